#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "loopsim/dataset.hpp"

namespace loopsim {

/// Binarized sparse row matrix: for each row (user), the ascending distinct
/// column indices (items) it interacts with.
class UserItemMatrix {
 public:
  UserItemMatrix() = default;
  UserItemMatrix(std::size_t rows, std::size_t cols, std::vector<std::pair<std::uint32_t, std::uint32_t>> entries);

  /// Rows = users of `ds`, entries = interactions at `indices`.
  static UserItemMatrix from_interactions(const InteractionDataset& ds, std::span<const std::size_t> indices);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return items_.size(); }

  std::span<const std::uint32_t> row(std::size_t r) const {
    return std::span<const std::uint32_t>(items_).subspan(offsets_[r], offsets_[r + 1] - offsets_[r]);
  }
  bool contains(std::size_t r, std::uint32_t c) const;

  UserItemMatrix transposed() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> items_;
};

}  // namespace loopsim
