#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lepl/types.hpp"

namespace lepl::detail {

/// `#<tag> v1 key=value ...`
struct Header {
  std::string tag;
  std::map<std::string, std::string, std::less<>> fields;

  /// Value of a required non-negative integer field.
  Index count(std::string_view key, const std::string& path) const;
  /// Value of a required string field.
  const std::string& text(std::string_view key, const std::string& path) const;
};

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path);

  /// Next line without its terminator; false at end of file. A final empty
  /// line produced by a trailing LF is not reported.
  bool next(std::string& line);
  std::size_t line_number() const noexcept { return line_no_; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::ifstream in_;
  std::string path_;
  std::size_t line_no_ = 0;
};

/// Parses line 1. `expected_keys` must all be present and nothing else.
Header read_header(LineReader& reader, std::string_view expected_tag,
                   const std::vector<std::string_view>& expected_keys);

std::vector<std::string_view> split_tokens(std::string_view line);

double parse_real(std::string_view token, const std::string& path, std::size_t line);
std::uint8_t parse_bit(std::string_view token, const std::string& path, std::size_t line);

/// Shortest decimal that reads back to the same double.
std::string format_real(double v);

/// Opens for writing; throws IoError on failure.
std::ofstream open_for_write(const std::filesystem::path& path);
void finish_write(std::ofstream& out, const std::filesystem::path& path);

/// Reads `rows` lines of exactly `cols` reals after the header.
Matrix read_real_rows(LineReader& reader, Index rows, Index cols);
/// Reads `rows` lines of exactly `cols` bits after the header.
BinaryMatrix read_bit_rows(LineReader& reader, Index rows, Index cols);

void write_real_rows(std::ostream& out, const Matrix& m);
void write_bit_rows(std::ostream& out, const BinaryMatrix& m);

}  // namespace lepl::detail
