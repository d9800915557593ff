#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace lepl {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using BinaryMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// n x d instance features. Every entry is finite and both dimensions are
/// at least one.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix values);

  Index n() const noexcept { return values_.rows(); }
  Index d() const noexcept { return values_.cols(); }
  const Matrix& values() const noexcept { return values_; }

  friend bool operator==(const FeatureMatrix& a, const FeatureMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

 private:
  Matrix values_;
};

enum class LabelKind {
  partial,  // exactly one positive per row
  full,     // at least one positive per row
  pseudo,   // unconstrained
};

std::string_view to_string(LabelKind kind) noexcept;
LabelKind parse_label_kind(std::string_view text);

/// n x C binary labels. The row invariant depends on the kind and is checked
/// on construction.
class LabelMatrix {
 public:
  LabelMatrix(BinaryMatrix values, LabelKind kind);

  Index n() const noexcept { return values_.rows(); }
  Index classes() const noexcept { return values_.cols(); }
  LabelKind kind() const noexcept { return kind_; }
  const BinaryMatrix& values() const noexcept { return values_; }
  bool positive(Index i, Index c) const noexcept { return values_(i, c) != 0; }

  /// Same entries, different kind. Re-validates against the new kind.
  LabelMatrix as(LabelKind kind) const { return LabelMatrix(values_, kind); }

  friend bool operator==(const LabelMatrix& a, const LabelMatrix& b) {
    return a.kind_ == b.kind_ && a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  BinaryMatrix values_;
  LabelKind kind_;
};

using PseudoLabelMatrix = LabelMatrix;

/// Throws ShapeError unless both operands have the same rows and columns.
void require_same_shape(Index rows_a, Index cols_a, Index rows_b, Index cols_b,
                        std::string_view what);

}  // namespace lepl
