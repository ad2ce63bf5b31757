#pragma once

#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "loopsim/dataset.hpp"

namespace loopsim::testing {

struct Row {
  std::string user;
  std::string user_country;  // "" -> OTHER
  std::string track;
  std::string track_country;
};

inline CountryLabel label(const std::string& code) {
  return code.empty() || code == "OTHER" ? CountryLabel::other() : CountryLabel(code);
}

inline InteractionDataset make_dataset(const std::vector<Row>& rows) {
  DatasetBuilder b;
  for (const auto& r : rows) b.add(r.user, label(r.user_country), r.track, label(r.track_country));
  return b.build();
}

/// Dataset from a dense 0/1 matrix; users "u<i>", tracks "t<j>" (ids padded
/// to two digits so index order equals id order), countries OTHER.
inline InteractionDataset from_matrix(const std::vector<std::vector<int>>& m) {
  DatasetBuilder b;
  auto id = [](char p, std::size_t i) {
    std::string s = std::to_string(i);
    return std::string(1, p) + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
  };
  for (std::size_t u = 0; u < m.size(); ++u) {
    for (std::size_t t = 0; t < m[u].size(); ++t) {
      if (m[u][t]) b.add(id('u', u), CountryLabel::other(), id('t', t), CountryLabel::other());
    }
  }
  return b.build();
}

inline std::filesystem::path source_dir() { return LOOPSIM_SOURCE_DIR; }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("loopsim_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n, double zero_probability = 0.2) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = u(rng) < zero_probability ? 0.0 : u(rng);
    total += v;
  }
  if (total == 0.0) {
    p[0] = 1.0;
    total = 1.0;
  }
  for (auto& v : p) v /= total;
  return p;
}

}  // namespace loopsim::testing
