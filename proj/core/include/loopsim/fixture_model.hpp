#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "loopsim/recommender.hpp"

namespace loopsim {

/// Precomputed scores read from a tab-separated `user_id  track_id  score`
/// file (optional header line starting with "user_id"). Pairs absent from
/// the file score -inf. Lets externally trained models join the loop. The
/// file is read once; the same scores serve every iteration.
class FixtureRecommender final : public Recommender {
 public:
  explicit FixtureRecommender(const std::filesystem::path& path);
  explicit FixtureRecommender(std::istream& in);

  std::string_view name() const override { return "fixture"; }
  FitReport fit(const TrainingData& data, const TrainingConfig& config) override;
  void score(UserIndex user, std::span<double> out) const override;
  std::size_t num_items() const override { return n_items_; }

  /// Rows whose user or track id is not part of the fitted dataset.
  std::size_t unmatched_rows() const noexcept { return unmatched_; }

 private:
  struct Row {
    std::string user;
    std::string track;
    double score;
  };

  void load(std::istream& in);

  std::vector<Row> rows_;
  std::size_t n_users_ = 0;
  std::size_t n_items_ = 0;
  std::size_t unmatched_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<std::pair<TrackIndex, double>> scores_;
};

}  // namespace loopsim
