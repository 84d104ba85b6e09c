// perclab: run, validate and oracle subcommands over experiment manifests.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "perclab/manifest.hpp"
#include "perclab/runner.hpp"
#include "reference.hpp"

namespace fs = std::filesystem;
using namespace perclab;

namespace {

// Reads and parses; prints the diagnostic and returns empty on failure.
std::optional<Manifest> load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read manifest " << path << "\n";
    return std::nullopt;
  }
  std::stringstream text;
  text << in.rdbuf();
  try {
    return Manifest::parse(text.str());
  } catch (const ParseError& e) {
    std::cerr << "error: " << path << ": " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << path << ": " << e.what() << "\n";
  }
  return std::nullopt;
}

int run(const std::string& path, const RunOptions& options) {
  const auto m = load(path);
  if (!m) return kExitInvalid;
  const auto report = run_manifest(*m, options);
  if (report.status != kExitOk) {
    std::cerr << "error: " << report.message << "\n";
    return report.status;
  }
  std::cout << report.message;
  if (report.units_resumed) std::cout << " (" << report.units_resumed << " of " << report.units_total << " units resumed)";
  std::cout << "\n";
  return kExitOk;
}

int validate(const std::string& path) {
  const auto m = load(path);
  if (!m) return kExitInvalid;
  std::cout << "kind " << to_string(m->kind()) << "\nhash " << m->hash_hex() << "\n";
  for (const auto& f : manifest_fields(m->kind())) {
    std::cout << "  " << f.key << " = ";
    if (m->has(f.key)) {
      std::cout << m->text(f.key);
      if (m->line(f.key) == 0) std::cout << "  (default)";
    } else {
      std::cout << "(unset)";
    }
    std::cout << "\n";
  }
  return kExitOk;
}

int oracle(const std::string& name, const fs::path& out_dir) {
  std::vector<std::string> names;
  if (name == "all") {
    names = reference::table_names();
  } else {
    names.push_back(name);
  }
  for (const auto& n : names) {
    std::string csv;
    try {
      csv = reference::table_csv(n);
    } catch (const std::invalid_argument& e) {
      std::cerr << "error: " << e.what() << "; known oracles:";
      for (const auto& k : reference::table_names()) std::cerr << ' ' << k;
      std::cerr << "\n";
      return kExitInvalid;
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const fs::path path = out_dir / ("oracle_" + n + ".csv");
    std::ofstream out(path);
    out << csv;
    if (!out) {
      std::cerr << "error: cannot write " << path.string() << "\n";
      return kExitRuntime;
    }
    std::cout << "wrote " << path.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bond percolation experiments: cluster geometry, isoperimetry, walks and wedges"};
  app.require_subcommand(1);

  RunOptions options;
  std::string manifest_path, oracle_name;
  std::string out_dir = ".";
  unsigned workers = 1;

  auto* run_cmd = app.add_subcommand("run", "Run an experiment manifest");
  run_cmd->add_option("manifest", manifest_path, "Manifest file")->required();
  run_cmd->add_option("--workers", workers, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));
  run_cmd->add_flag("--resume", options.resume, "Reuse units finished by an interrupted run");
  run_cmd->add_option("--out-dir", out_dir, "Directory for the CSV and JSON outputs");

  auto* validate_cmd = app.add_subcommand("validate", "Check a manifest and print its resolved fields");
  validate_cmd->add_option("manifest", manifest_path, "Manifest file")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Write a brute-force reference table");
  oracle_cmd->add_option("name", oracle_name, "polyomino, cutset, heat-kernel, lattice or all")->required();
  oracle_cmd->add_option("--out-dir", out_dir, "Directory for the table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  if (*run_cmd) {
    options.out_dir = out_dir;
    options.workers = workers;
    return run(manifest_path, options);
  }
  if (*validate_cmd) return validate(manifest_path);
  return oracle(oracle_name, out_dir);
}
