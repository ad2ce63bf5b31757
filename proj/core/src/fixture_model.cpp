#include "loopsim/fixture_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "loopsim/errors.hpp"

namespace loopsim {

FixtureRecommender::FixtureRecommender(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open fixture scores '" + path.string() + "'");
  load(in);
}

FixtureRecommender::FixtureRecommender(std::istream& in) { load(in); }

void FixtureRecommender::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("user_id", 0) == 0) continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? std::string::npos : line.find('\t', a + 1);
    if (b == std::string::npos || line.find('\t', b + 1) != std::string::npos) {
      throw ParseError(line_no, "expected 3 tab-separated columns: user_id, track_id, score");
    }
    Row row{line.substr(0, a), line.substr(a + 1, b - a - 1), 0.0};
    const std::string_view field(line.data() + b + 1, line.size() - b - 1);
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), row.score);
    if (ec != std::errc{} || ptr != field.data() + field.size() || std::isnan(row.score)) {
      throw ParseError(line_no, "invalid score '" + std::string(field) + "'");
    }
    if (row.user.empty() || row.track.empty()) throw ParseError(line_no, "empty id");
    rows_.push_back(std::move(row));
  }
}

FitReport FixtureRecommender::fit(const TrainingData& data, const TrainingConfig& /*config*/) {
  n_users_ = data.users.size();
  n_items_ = data.tracks.size();
  std::unordered_map<std::string_view, UserIndex> users;
  std::unordered_map<std::string_view, TrackIndex> tracks;
  for (std::size_t u = 0; u < n_users_; ++u) users.emplace(data.users[u].id, static_cast<UserIndex>(u));
  for (std::size_t t = 0; t < n_items_; ++t) tracks.emplace(data.tracks[t].id, static_cast<TrackIndex>(t));

  std::vector<std::tuple<UserIndex, TrackIndex, double>> matched;
  unmatched_ = 0;
  for (const auto& row : rows_) {
    auto u = users.find(row.user);
    auto t = tracks.find(row.track);
    if (u == users.end() || t == tracks.end()) {
      ++unmatched_;
      continue;
    }
    matched.emplace_back(u->second, t->second, row.score);
  }
  std::stable_sort(matched.begin(), matched.end(), [](const auto& x, const auto& y) {
    return std::get<0>(x) < std::get<0>(y);
  });
  offsets_.assign(n_users_ + 1, 0);
  scores_.clear();
  scores_.reserve(matched.size());
  for (const auto& [u, t, s] : matched) {
    ++offsets_[u + 1];
    scores_.emplace_back(t, s);
  }
  for (std::size_t u = 0; u < n_users_; ++u) offsets_[u + 1] += offsets_[u];
  return FitReport{};
}

void FixtureRecommender::score(UserIndex user, std::span<double> out) const {
  if (user >= n_users_) throw UnknownUserError("fixture: unknown user index " + std::to_string(user));
  if (out.size() != n_items_) throw ContractError("fixture: score buffer has the wrong size");
  std::fill(out.begin(), out.end(), -std::numeric_limits<double>::infinity());
  // Later rows for the same pair win.
  for (std::size_t p = offsets_[user]; p < offsets_[user + 1]; ++p) out[scores_[p].first] = scores_[p].second;
}

}  // namespace loopsim
