#include "loopsim/record.hpp"

#include <algorithm>

namespace loopsim {

std::size_t IterationRecord::accepted_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(users.begin(), users.end(), [](const UserRecord& r) { return r.accepted.has_value(); }));
}

RecordSummary summarize(const IterationRecord& record, std::span<const UserIndex> selection) {
  RecordSummary s;
  double rec_local = 0.0;
  double rec_us = 0.0;
  double rec_cjsd = 0.0;
  double rec_pjsd = 0.0;
  for (auto u : selection) {
    const auto& r = record.users.at(u);
    ++s.users;
    s.prof_local += r.prof_local;
    s.prof_us += r.prof_us;
    s.profile_country_jsd += r.profile_country_jsd;
    s.profile_pop_jsd += r.profile_pop_jsd;
    s.profile_pop_jsd_frozen += r.profile_pop_jsd_frozen;
    if (r.accepted) ++s.accepted;
    if (r.rec_local) {
      ++s.users_with_recs;
      rec_local += *r.rec_local;
      rec_us += r.rec_us.value_or(0.0);
      rec_cjsd += r.rec_country_jsd.value_or(0.0);
      rec_pjsd += r.rec_pop_jsd.value_or(0.0);
    }
  }
  if (s.users > 0) {
    const auto n = static_cast<double>(s.users);
    s.prof_local /= n;
    s.prof_us /= n;
    s.profile_country_jsd /= n;
    s.profile_pop_jsd /= n;
    s.profile_pop_jsd_frozen /= n;
  }
  if (s.users_with_recs > 0) {
    const auto n = static_cast<double>(s.users_with_recs);
    s.rec_local = rec_local / n;
    s.rec_us = rec_us / n;
    s.rec_country_jsd = rec_cjsd / n;
    s.rec_pop_jsd = rec_pjsd / n;
  }
  return s;
}

RecordSummary summarize(const IterationRecord& record, std::span<const UserMeta> users,
                        std::optional<CountryLabel> country) {
  std::vector<UserIndex> selection;
  selection.reserve(record.users.size());
  for (std::size_t u = 0; u < record.users.size(); ++u) {
    if (!country || users[u].country == *country) selection.push_back(static_cast<UserIndex>(u));
  }
  return summarize(record, selection);
}

}  // namespace loopsim
