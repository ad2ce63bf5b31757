#include "loopsim/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "loopsim/errors.hpp"
#include "loopsim/ingest.hpp"

namespace loopsim {

namespace fs = std::filesystem;

namespace {

constexpr const char* kProvenanceHeader = "user_id\ttrack_id\titeration";

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())) || !out.flush()) {
    throw DataError("cannot write '" + path.string() + "'");
  }
}

}  // namespace

fs::path checkpoint_path(const fs::path& run_dir, std::uint32_t iteration) {
  char name[32];
  std::snprintf(name, sizeof name, "iter_%04u", static_cast<unsigned>(iteration));
  return run_dir / "checkpoints" / name;
}

void write_checkpoint(const fs::path& dir, const InteractionDataset& ds, const CheckpointState& state,
                      const fs::path& metrics_csv, const std::string& config_text) {
  fs::path tmp = dir;
  tmp += ".tmp";
  std::error_code ec;
  fs::remove_all(tmp, ec);
  fs::create_directories(tmp);

  write_interactions(ds, tmp / "interactions.tsv");

  std::string provenance = kProvenanceHeader;
  provenance += '\n';
  for (const auto& x : ds.interactions()) {
    if (!x.augmented()) continue;
    provenance += ds.user(x.user).id;
    provenance += '\t';
    provenance += ds.track(x.track).id;
    provenance += '\t';
    provenance += std::to_string(x.origin);
    provenance += '\n';
  }
  write_text(tmp / "provenance.tsv", provenance);

  const nlohmann::ordered_json j = {
      {"iteration", state.iteration},
      {"seed", state.seed},
      {"config_hash", state.config_hash},
      {"dataset_fingerprint", state.dataset_fingerprint},
  };
  write_text(tmp / "state.json", j.dump(2) + "\n");

  if (!metrics_csv.empty()) fs::copy_file(metrics_csv, tmp / "metrics.csv", fs::copy_options::overwrite_existing);
  if (!config_text.empty()) write_text(tmp / "config.json", config_text);

  fs::remove_all(dir, ec);
  fs::rename(tmp, dir);
}

Checkpoint load_checkpoint(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("checkpoint '" + dir.string() + "' is not a directory");
  Checkpoint cp;
  cp.dir = dir;

  try {
    const auto j = nlohmann::json::parse(read_text(dir / "state.json"));
    cp.state.iteration = j.at("iteration").get<std::uint32_t>();
    cp.state.seed = j.at("seed").get<std::uint64_t>();
    cp.state.config_hash = j.value("config_hash", "");
    cp.state.dataset_fingerprint = j.value("dataset_fingerprint", "");
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint state.json: " + std::string(e.what()));
  }

  const auto flat = ingest(dir / "interactions.tsv");

  std::map<std::pair<std::string, std::string>, std::uint32_t> origins;
  std::istringstream prov(read_text(dir / "provenance.tsv"));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(prov, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    const auto a = line.find('\t');
    const auto b = a == std::string::npos ? a : line.find('\t', a + 1);
    if (b == std::string::npos) throw ParseError(line_no, "provenance.tsv: expected 3 columns");
    std::uint32_t iteration = 0;
    try {
      iteration = static_cast<std::uint32_t>(std::stoul(line.substr(b + 1)));
    } catch (const std::exception&) {
      throw ParseError(line_no, "provenance.tsv: invalid iteration");
    }
    origins[{line.substr(0, a), line.substr(a + 1, b - a - 1)}] = iteration;
  }

  std::vector<Interaction> interactions(flat.interactions().begin(), flat.interactions().end());
  std::size_t matched = 0;
  for (auto& x : interactions) {
    auto it = origins.find({flat.user(x.user).id, flat.track(x.track).id});
    if (it == origins.end()) continue;
    x.origin = it->second;
    ++matched;
  }
  if (matched != origins.size()) throw DataError("checkpoint provenance references unknown interactions");
  cp.dataset = InteractionDataset({flat.users().begin(), flat.users().end()},
                                  {flat.tracks().begin(), flat.tracks().end()}, std::move(interactions));

  if (!cp.state.dataset_fingerprint.empty() &&
      cp.state.dataset_fingerprint != fingerprint_hex(dataset_fingerprint(cp.dataset))) {
    throw DataError("checkpoint '" + dir.string() + "': interactions do not match the recorded fingerprint");
  }
  if (fs::exists(dir / "metrics.csv")) cp.metrics_csv = dir / "metrics.csv";
  if (fs::exists(dir / "config.json")) cp.config_text = read_text(dir / "config.json");
  return cp;
}

}  // namespace loopsim
