#include "loopsim/itemknn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loopsim/errors.hpp"

namespace loopsim {

namespace {

void cooccurrence_row(const UserItemMatrix& item_users, const UserItemMatrix& user_items, TrackIndex item,
                      std::vector<std::uint32_t>& counts, std::vector<TrackIndex>& touched) {
  for (auto u : item_users.row(item)) {
    for (auto j : user_items.row(u)) {
      if (counts[j]++ == 0) touched.push_back(j);
    }
  }
}

double cosine(std::uint32_t common, std::size_t n_i, std::size_t n_j, double shrinkage) {
  if (common == 0 || n_i == 0 || n_j == 0) return 0.0;
  return static_cast<double>(common) /
         (std::sqrt(static_cast<double>(n_i) * static_cast<double>(n_j)) + shrinkage);
}

}  // namespace

std::vector<double> item_cosine_row(const UserItemMatrix& item_users, TrackIndex item, double shrinkage) {
  const auto user_items = item_users.transposed();
  std::vector<std::uint32_t> counts(item_users.rows(), 0);
  std::vector<TrackIndex> touched;
  cooccurrence_row(item_users, user_items, item, counts, touched);
  std::vector<double> row(item_users.rows(), 0.0);
  const auto n_i = item_users.row(item).size();
  for (auto j : touched) {
    if (j == item) continue;
    row[j] = cosine(counts[j], n_i, item_users.row(j).size(), shrinkage);
  }
  return row;
}

FitReport ItemKnnRecommender::fit(const TrainingData& data, const TrainingConfig& config) {
  if (data.train.nnz() == 0) throw ContractError("itemknn: training split is empty");
  config.validate();
  const auto& params = config.itemknn;
  n_items_ = data.train.cols();
  train_ = data.train;
  const auto item_users = data.train.transposed();

  neighbor_offsets_.assign(n_items_ + 1, 0);
  neighbors_.clear();
  std::vector<std::uint32_t> counts(n_items_, 0);
  std::vector<TrackIndex> touched;
  std::vector<Neighbor> row;
  for (TrackIndex i = 0; i < n_items_; ++i) {
    touched.clear();
    row.clear();
    cooccurrence_row(item_users, data.train, i, counts, touched);
    const auto n_i = item_users.row(i).size();
    for (auto j : touched) {
      if (j != i) {
        const double s = cosine(counts[j], n_i, item_users.row(j).size(), params.shrinkage);
        if (s > 0.0) row.push_back(Neighbor{j, s});
      }
      counts[j] = 0;
    }
    auto closer = [](const Neighbor& a, const Neighbor& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      return a.item < b.item;
    };
    const std::size_t keep = std::min(params.neighbors, row.size());
    std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(keep), row.end(), closer);
    row.resize(keep);
    std::sort(row.begin(), row.end(), [](const Neighbor& a, const Neighbor& b) { return a.item < b.item; });
    neighbors_.insert(neighbors_.end(), row.begin(), row.end());
    neighbor_offsets_[i + 1] = neighbors_.size();
  }

  reverse_offsets_.assign(n_items_ + 1, 0);
  for (const auto& nb : neighbors_) ++reverse_offsets_[nb.item + 1];
  for (std::size_t j = 0; j < n_items_; ++j) reverse_offsets_[j + 1] += reverse_offsets_[j];
  reverse_.assign(neighbors_.size(), Neighbor{0, 0.0});
  std::vector<std::size_t> cursor(reverse_offsets_.begin(), reverse_offsets_.end() - 1);
  for (TrackIndex i = 0; i < n_items_; ++i) {
    for (const auto& nb : neighbors(i)) reverse_[cursor[nb.item]++] = Neighbor{i, nb.similarity};
  }
  return FitReport{};
}

std::span<const ItemKnnRecommender::Neighbor> ItemKnnRecommender::neighbors(TrackIndex item) const {
  return std::span<const Neighbor>(neighbors_).subspan(neighbor_offsets_[item],
                                                       neighbor_offsets_[item + 1] - neighbor_offsets_[item]);
}

void ItemKnnRecommender::score(UserIndex user, std::span<double> out) const {
  if (user >= train_.rows()) throw UnknownUserError("itemknn: unknown user index " + std::to_string(user));
  if (out.size() != n_items_) throw ContractError("itemknn: score buffer has the wrong size");
  std::fill(out.begin(), out.end(), 0.0);
  for (auto j : train_.row(user)) {
    for (std::size_t p = reverse_offsets_[j]; p < reverse_offsets_[j + 1]; ++p) {
      out[reverse_[p].item] += reverse_[p].similarity;
    }
  }
}

}  // namespace loopsim
