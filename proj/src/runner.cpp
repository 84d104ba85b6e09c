#include "perclab/runner.hpp"

#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "perclab/experiments.hpp"

namespace perclab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<json> read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

// Completed units of an earlier run of the same manifest. A torn last line
// (interrupted write) is ignored.
std::map<std::size_t, json> read_partial(const fs::path& path, const std::string& hash) {
  std::map<std::size_t, json> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception&) {
      continue;
    }
    if (rec.value("manifest_hash", "") != hash || rec.value("code_version", "") != kCodeVersion) continue;
    out[rec.at("unit").get<std::size_t>()] = rec.at("data");
  }
  return out;
}

void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

RunReport run_manifest(const Manifest& manifest, const RunOptions& options) {
  RunReport report;
  const std::string hash = manifest.hash_hex();
  const fs::path base = options.out_dir / manifest.output();
  report.csv = base.string() + ".csv";
  report.summary = base.string() + ".json";
  const fs::path partial_path = base.string() + ".partial.jsonl";

  try {
    std::error_code ec;
    fs::create_directories(report.summary.parent_path(), ec);
    if (const auto old = read_json(report.summary)) {
      if (old->value("manifest_hash", "") == hash && old->value("code_version", "") == kCodeVersion &&
          fs::exists(report.csv)) {
        report.up_to_date = true;
        report.message = "up to date: " + report.summary.string();
        return report;
      }
    }

    const auto experiment = make_experiment(manifest);
    const std::size_t total = experiment->num_units();
    report.units_total = total;
    std::vector<std::optional<json>> done(total);
    if (options.resume) {
      for (auto& [i, data] : read_partial(partial_path, hash))
        if (i < total) {
          done[i] = std::move(data);
          ++report.units_resumed;
        }
    }

    std::ofstream partial(partial_path, options.resume ? std::ios::app : std::ios::trunc);
    if (!partial) throw std::runtime_error("cannot write " + partial_path.string());
    // Rewrite the file when resuming so a torn last line is dropped.
    if (options.resume) {
      partial.close();
      std::ostringstream kept;
      for (std::size_t i = 0; i < total; ++i)
        if (done[i])
          kept << json{{"manifest_hash", hash}, {"code_version", kCodeVersion}, {"unit", i}, {"data", *done[i]}}.dump()
               << '\n';
      write_atomically(partial_path, kept.str());
      partial.open(partial_path, std::ios::app);
    }

    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < total; ++i)
      if (!done[i]) todo.push_back(i);
    if (options.stop_after && options.stop_after < todo.size()) {
      todo.resize(options.stop_after);
      report.stopped = true;
    }

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    auto work = [&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= todo.size()) return;
        {
          std::lock_guard lock(mu);
          if (failure) return;
        }
        try {
          const std::size_t i = todo[k];
          json data = experiment->run_unit(i);
          const UnitInfo info = experiment->unit(i);
          const json rec{{"manifest_hash", hash}, {"code_version", kCodeVersion}, {"unit", i},
                         {"trial_lo", info.trial_lo}, {"trial_hi", info.trial_hi}, {"data", data}};
          bool written = false;
          {
            std::lock_guard lock(mu);
            partial << rec.dump() << '\n' << std::flush;
            written = static_cast<bool>(partial);
            done[i] = std::move(data);
          }
          if (!written) throw std::runtime_error("cannot write " + partial_path.string());
        } catch (...) {
          std::lock_guard lock(mu);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(todo.size())));
    if (workers <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    partial.close();
    if (report.stopped) {
      report.message = "stopped with " + std::to_string(todo.size()) + " new units in " + partial_path.string();
      return report;
    }

    std::vector<json> units;
    units.reserve(total);
    for (auto& d : done) units.push_back(std::move(*d));
    std::vector<CsvRow> rows;
    json summary = json::object();
    experiment->finish(units, rows, summary);

    std::ostringstream csv;
    csv << csv_schema_line(manifest.kind()) << '\n' << csv_header(*experiment) << '\n';
    for (const auto& r : rows)
      csv << hash << ',' << kCodeVersion << ',' << r.seed << ',' << r.trial_lo << ',' << r.trial_hi << ','
          << r.fields << '\n';
    write_atomically(report.csv, csv.str());

    summary["kind"] = to_string(manifest.kind());
    summary["manifest_hash"] = hash;
    summary["code_version"] = kCodeVersion;
    summary["seed"] = manifest.integer("seed");
    summary["units"] = total;
    summary["csv"] = report.csv.filename().string();
    write_atomically(report.summary, summary.dump(2) + "\n");
    fs::remove(partial_path, ec);
    report.message = "wrote " + report.csv.string() + " and " + report.summary.string();
  } catch (const std::exception& e) {
    report.status = kExitRuntime;
    report.message = e.what();
  }
  return report;
}

}  // namespace perclab
