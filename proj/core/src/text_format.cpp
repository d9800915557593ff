#include "text_format.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "lepl/error.hpp"

namespace lepl::detail {

Index Header::count(std::string_view key, const std::string& path) const {
  const std::string& value = text(key, path);
  Index out = 0;
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last || out < 0) {
    throw FormatError(path, 1, "malformed header: " + std::string(key) + "=" + value +
                                   " is not a non-negative integer");
  }
  return out;
}

const std::string& Header::text(std::string_view key, const std::string& path) const {
  const auto it = fields.find(key);
  if (it == fields.end()) {
    throw FormatError(path, 1, "malformed header: missing field '" + std::string(key) + "'");
  }
  return it->second;
}

LineReader::LineReader(const std::filesystem::path& path)
    : in_(path, std::ios::binary), path_(path.string()) {
  if (!in_) {
    throw IoError("cannot open '" + path_ + "' for reading");
  }
}

bool LineReader::next(std::string& line) {
  if (!std::getline(in_, line)) {
    return false;
  }
  ++line_no_;
  return true;
}

std::vector<std::string_view> split_tokens(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) {
      ++pos;
    }
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') {
      ++pos;
    }
    if (pos > start) {
      tokens.push_back(line.substr(start, pos - start));
    }
  }
  return tokens;
}

Header read_header(LineReader& reader, std::string_view expected_tag,
                   const std::vector<std::string_view>& expected_keys) {
  std::string line;
  if (!reader.next(line)) {
    throw FormatError(reader.path(), 1, "malformed header: file is empty");
  }
  const auto tokens = split_tokens(line);
  if (tokens.size() < 2 || tokens[0].empty() || tokens[0][0] != '#') {
    throw FormatError(reader.path(), 1, "malformed header: expected '#" +
                                            std::string(expected_tag) + " v1 ...'");
  }
  Header h;
  h.tag = std::string(tokens[0].substr(1));
  if (h.tag != expected_tag) {
    throw FormatError(reader.path(), 1, "malformed header: expected tag '" +
                                            std::string(expected_tag) + "', found '" + h.tag +
                                            "'");
  }
  if (tokens[1] != "v1") {
    throw FormatError(reader.path(), 1,
                      "malformed header: unsupported version '" + std::string(tokens[1]) + "'");
  }
  for (std::size_t t = 2; t < tokens.size(); ++t) {
    const auto eq = tokens[t].find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw FormatError(reader.path(), 1,
                        "malformed header: bad field '" + std::string(tokens[t]) + "'");
    }
    std::string key(tokens[t].substr(0, eq));
    if (!h.fields.emplace(key, std::string(tokens[t].substr(eq + 1))).second) {
      throw FormatError(reader.path(), 1, "malformed header: duplicate field '" + key + "'");
    }
  }
  for (const auto key : expected_keys) {
    h.text(key, reader.path());
  }
  if (h.fields.size() != expected_keys.size()) {
    throw FormatError(reader.path(), 1, "malformed header: unexpected extra fields");
  }
  return h;
}

double parse_real(std::string_view token, const std::string& path, std::size_t line) {
  double v = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec == std::errc::result_out_of_range) {
    throw FormatError(path, line, "non-finite value '" + std::string(token) + "'");
  }
  if (ec != std::errc{} || ptr != last) {
    throw FormatError(path, line, "non-numeric token '" + std::string(token) + "'");
  }
  if (!std::isfinite(v)) {
    throw FormatError(path, line, "non-finite value '" + std::string(token) + "'");
  }
  return v;
}

std::uint8_t parse_bit(std::string_view token, const std::string& path, std::size_t line) {
  if (token == "0") {
    return 0;
  }
  if (token == "1") {
    return 1;
  }
  throw FormatError(path, line, "entry '" + std::string(token) + "' is outside {0,1}");
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    throw IoError("cannot format value");
  }
  return std::string(buf, ptr);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void finish_write(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

namespace {

template <typename Parse, typename Out>
void read_rows(LineReader& reader, Index rows, Index cols, Out& out, Parse parse) {
  std::string line;
  for (Index r = 0; r < rows; ++r) {
    if (!reader.next(line)) {
      throw FormatError(reader.path(), reader.line_number() + 1,
                        "row-count mismatch: header declares " + std::to_string(rows) +
                            " rows, file has " + std::to_string(r));
    }
    const auto tokens = split_tokens(line);
    if (static_cast<Index>(tokens.size()) != cols) {
      throw FormatError(reader.path(), reader.line_number(),
                        "column-count mismatch: expected " + std::to_string(cols) +
                            " entries, found " + std::to_string(tokens.size()));
    }
    for (Index c = 0; c < cols; ++c) {
      out(r, c) = parse(tokens[static_cast<std::size_t>(c)], reader.path(), reader.line_number());
    }
  }
  if (reader.next(line)) {
    throw FormatError(reader.path(), reader.line_number(),
                      "row-count mismatch: header declares " + std::to_string(rows) +
                          " rows, file has more");
  }
}

}  // namespace

Matrix read_real_rows(LineReader& reader, Index rows, Index cols) {
  Matrix m(rows, cols);
  read_rows(reader, rows, cols, m, parse_real);
  return m;
}

BinaryMatrix read_bit_rows(LineReader& reader, Index rows, Index cols) {
  BinaryMatrix m(rows, cols);
  read_rows(reader, rows, cols, m, parse_bit);
  return m;
}

void write_real_rows(std::ostream& out, const Matrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) {
        out << ' ';
      }
      out << format_real(m(r, c));
    }
    out << '\n';
  }
}

void write_bit_rows(std::ostream& out, const BinaryMatrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c > 0) {
        out << ' ';
      }
      out << (m(r, c) != 0 ? '1' : '0');
    }
    out << '\n';
  }
}

}  // namespace lepl::detail
