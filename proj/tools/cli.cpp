// Copyright 2026 The mot_hijack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mothijack/config.hpp"
#include "mothijack/errors.hpp"
#include "mothijack/experiments.hpp"
#include "mothijack/frame_log.hpp"

namespace mothijack::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string flag_name(std::string_view key) {
  std::string s = "--" + std::string(key);
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

// Registers one flag per config key; values are collected as raw tokens and
// converted after parsing so flags and config files share one schema.
struct KeyFlags {
  std::span<ConfigKey const> keys;
  std::map<std::string, std::vector<std::string>> tokens;

  void add_to(CLI::App* app) {
    for (auto const& k : keys) {
      auto& slot = tokens[std::string(k.name)];
      auto* opt = app->add_option(flag_name(k.name), slot, std::string(k.help));
      switch (k.type) {
        case KeyType::kNumberList:
        case KeyType::kIntegerList:
        case KeyType::kStringList:
        case KeyType::kPresets:
          opt->expected(1, CLI::detail::expected_max_vector_size);
          break;
        case KeyType::kVec2:
          opt->expected(2);
          break;
        default:
          opt->expected(1);
      }
    }
  }

  json merged(std::optional<fs::path> const& config_file) const {
    json j = json::object();
    if (config_file) {
      j = load_json_file(*config_file);
      if (!j.is_object()) throw ValidationError("config: expected a JSON object");
    }
    for (auto const& k : keys) {
      auto const& t = tokens.at(std::string(k.name));
      if (!t.empty()) j[std::string(k.name)] = flag_value_to_json(k, t);
    }
    return j;
  }
};

// --out-dir, then the directory a manifest recorded, then the environment,
// then the built-in default. Always absolute so manifests replay from anywhere.
fs::path resolve_out_dir(std::optional<fs::path> const& flag,
                         std::optional<fs::path> const& recorded = std::nullopt) {
  fs::path dir = kDefaultOutDir;
  if (flag) {
    dir = *flag;
  } else if (recorded) {
    dir = *recorded;
  } else if (char const* env = std::getenv(kOutDirEnv); env && *env) {
    dir = env;
  }
  return fs::absolute(dir).lexically_normal();
}

void write_file(fs::path const& p, std::string const& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << content;
}

std::string json_text(json const& j) { return j.dump(2) + "\n"; }

json make_manifest(std::string const& sub, json const& config, json const& inputs,
                   fs::path const& out_dir, std::uint64_t seed) {
  json m;
  m["tool"] = "mothijack";
  m["version"] = std::string(kToolVersion);
  m["subcommand"] = sub;
  m["config"] = config;
  m["inputs"] = inputs;
  m["output_dir"] = out_dir.string();
  m["seed"] = seed;
  return m;
}

json opt_box(std::optional<int> const& v) { return v ? json(*v) : json(nullptr); }

json summary_json(AttackRunConfig const& cfg, AttackResult const& r) {
  json j;
  j["kind"] = std::string(to_string(cfg.kind));
  j["status"] = std::string(to_string(r.status));
  j["frames_attacked"] = r.frames_attacked;
  j["target_track_id"] = r.target_track_id;
  j["hijacked_track_id"] = opt_box(r.hijacked_track_id);
  j["hijacked_velocity"] =
      r.hijacked_velocity ? json::array({r.hijacked_velocity->dx, r.hijacked_velocity->dy})
                          : json(nullptr);
  j["hijack_held"] = r.hijack_held;
  j["ghost_frames"] = r.trace.ghost_frames;
  j["ghost_deleted"] = r.trace.ghost_deleted;
  j["blackout_frames"] = r.trace.blackout_frames;
  j["target_reconfirmed"] = r.trace.target_reconfirmed;
  j["recovered_track_id"] = opt_box(r.trace.recovered_track_id);
  j["message"] = r.message;
  return j;
}

// Config paths are made absolute so a manifest replays from anywhere.
AttackRunConfig absolutize(AttackRunConfig cfg) {
  if (cfg.scenario) cfg.scenario = fs::absolute(*cfg.scenario).lexically_normal();
  return cfg;
}

SweepConfig absolutize(SweepConfig cfg) {
  for (auto& f : cfg.scenario_files) f = fs::absolute(f).lexically_normal();
  return cfg;
}

int exec_attack(AttackRunConfig const& cfg, fs::path const& out_dir, std::ostream& out) {
  json inputs = json::array();
  if (cfg.scenario) inputs.push_back(cfg.scenario->string());
  fs::create_directories(out_dir);
  write_file(out_dir / "manifest.json",
             json_text(make_manifest("attack", to_json(cfg), inputs, out_dir, cfg.seed)));

  Scenario const s = resolve_scenario(cfg);
  write_file(out_dir / "scenario.txt", to_text(s));

  TrackerConfig const tc = cfg.tracker();
  FrameLog log;
  AttackResult r;
  if (cfg.kind == AttackKind::kHijack) {
    AttackSpec spec = AttackSpec::for_scenario(s);
    spec.max_frames = cfg.frames;
    spec.gamma = cfg.gamma;
    spec.start_frame = cfg.start_frame;
    spec.ae_success_prob = cfg.ae_success_prob;
    spec.seed = cfg.seed;
    if (cfg.direction) spec.direction = *cfg.direction;
    r = hijack(s, tc, spec, &log);
  } else {
    EraseSpec spec;
    spec.n_frames = cfg.frames;
    spec.start_frame = cfg.start_frame;
    spec.ae_success_prob = cfg.ae_success_prob;
    spec.seed = cfg.seed;
    r = erase_attack(s, tc, spec, &log);
  }

  std::ostringstream frames;
  log.write(frames);
  write_file(out_dir / "frames.jsonl", frames.str());
  write_file(out_dir / "summary.json", json_text(summary_json(cfg, r)));

  out << to_string(cfg.kind) << ' ' << s.name << ": " << to_string(r.status) << " ("
      << r.frames_attacked << " frame(s) attacked";
  if (r.hijacked_track_id) out << ", track " << *r.hijacked_track_id << " hijacked";
  out << ")\n";

  switch (r.status) {
    case AttackStatus::kSucceeded:
      return kExitOk;
    case AttackStatus::kInfeasible:
      return kExitInfeasible;
    case AttackStatus::kBudgetExhausted:
      return kExitBudgetExhausted;
  }
  return kExitInternal;
}

int exec_sweep(SweepConfig const& cfg, fs::path const& out_dir, bool resume, std::ostream& out) {
  json inputs = json::array();
  for (auto const& f : cfg.scenario_files) inputs.push_back(f.string());
  fs::create_directories(out_dir);
  write_file(out_dir / "manifest.json",
             json_text(make_manifest("sweep", to_json(cfg), inputs, out_dir, cfg.seed)));

  fs::path const journal = out_dir / "journal.jsonl";
  if (!resume) fs::remove(journal);
  ResultTable const t = run_sweep(cfg, {journal});

  std::ostringstream csv, plot;
  t.write_csv(csv);
  t.write_plot_data(plot);
  write_file(out_dir / "table.csv", csv.str());
  write_file(out_dir / "plot.dat", plot.str());

  std::size_t errors = 0;
  for (auto const& r : t.rows) errors += !r.error.empty() && r.scenario != kAllScenarios;
  out << "sweep: " << t.rows.size() << " rows written to " << (out_dir / "table.csv").string();
  if (errors > 0) out << " (" << errors << " rows with errors)";
  out << '\n';
  return kExitOk;
}

void print_analysis(std::vector<int> const& ages, std::optional<fs::path> const& table,
                    std::ostream& out) {
  for (int r : ages) {
    out << "required erase reliability at R=" << r << ": "
        << format_number(required_erase_reliability(r)) << " (" << r - 1 << "/" << r << ")\n";
  }
  if (!table) return;
  std::ifstream in(*table);
  if (!in) throw ParseError("cannot open '" + table->string() + "'", 0);
  ResultTable const t = read_result_table(in);
  std::string current;
  for (auto const& row : t.rows) {
    if (row.scenario != kAllScenarios) continue;
    std::string const series = std::string(to_string(row.kind)) + " R=" +
                               std::to_string(row.reserved_age) + " H=" +
                               std::to_string(row.hit_count) + " cov=" + format_number(row.cov);
    if (series != current) {
      if (!current.empty()) out << '\n';
      current = series;
      out << series << ": mean min frames "
          << (row.mean_min_frames ? format_number(*row.mean_min_frames) : "n/a") << ';';
    }
    out << " k=" << row.frames << ' ' << format_number(row.success_rate);
  }
  if (!current.empty()) out << '\n';
}

}  // namespace

int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tracker hijacking attack toolkit for tracking-by-detection pipelines",
               "mothijack"};
  app.require_subcommand(1);

  // validate
  auto* validate = app.add_subcommand("validate", "check scenario files");
  std::vector<fs::path> validate_paths;
  int validate_h = 6;
  validate->add_option("paths", validate_paths, "scenario files")->required();
  validate->add_option("--hit-count", validate_h, "H used for the warm-up length check");

  // attack
  auto* attack = app.add_subcommand("attack", "run one hijack or erase attack");
  std::optional<fs::path> attack_config, attack_out;
  attack->add_option("--config", attack_config, "JSON config; flags override its keys");
  attack->add_option("--out-dir", attack_out, "output directory");
  KeyFlags attack_flags{attack_config_keys(), {}};
  attack_flags.add_to(attack);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "evaluate success rates over a parameter grid");
  std::optional<fs::path> sweep_config, sweep_out;
  bool resume = false;
  sweep->add_option("--config", sweep_config, "JSON config; flags override its keys");
  sweep->add_option("--out-dir", sweep_out, "output directory");
  sweep->add_flag("--resume", resume, "reuse finished cells from the journal");
  KeyFlags sweep_flags{sweep_config_keys(), {}};
  sweep_flags.add_to(sweep);

  // gen
  auto* gen = app.add_subcommand("gen", "write a generated scenario file");
  std::string gen_name;
  std::uint64_t gen_seed = 1;
  std::optional<fs::path> gen_out;
  std::optional<std::string> gen_file;
  gen->add_option("generator", gen_name, "move-in, move-out, straight-line, heading-change or a bundled id")
      ->required();
  gen->add_option("--seed", gen_seed, "noise seed");
  gen->add_option("--out-dir", gen_out, "output directory");
  gen->add_option("--file-name", gen_file, "file name inside the output directory");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "derived statistics");
  std::vector<int> ages{60};
  std::optional<fs::path> table;
  analyze->add_option("--reserved-age", ages, "R values for the erase reliability figure");
  analyze->add_option("--table", table, "summarize a sweep table");

  // replay
  auto* replay = app.add_subcommand("replay", "re-run an attack or sweep from its manifest");
  fs::path manifest_path;
  std::optional<fs::path> replay_out;
  replay->add_option("manifest", manifest_path, "manifest.json")->required();
  replay->add_option("--out-dir", replay_out, "output directory (default: the manifest's)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (CLI::CallForHelp const& e) {
    out << app.help();
    return kExitOk;
  } catch (CLI::CallForAllHelp const& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (CLI::ParseError const& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*validate) {
      int rc = kExitOk;
      for (auto const& p : validate_paths) {
        try {
          Scenario const s = load_scenario(p, validate_h);
          out << p.string() << ": ok (" << s.frames.size() << " frames, target '"
              << s.target_label << "')\n";
        } catch (ParseError const& e) {
          err << p.string() << ": parse error: " << e.what() << '\n';
          rc = kExitValidation;
        } catch (ValidationError const& e) {
          err << p.string() << ": invalid: " << e.what() << '\n';
          rc = kExitValidation;
        }
      }
      return rc;
    }
    if (*attack) {
      AttackRunConfig const cfg =
          absolutize(attack_config_from_json(attack_flags.merged(attack_config)));
      return exec_attack(cfg, resolve_out_dir(attack_out), out);
    }
    if (*sweep) {
      SweepConfig const cfg = absolutize(sweep_config_from_json(sweep_flags.merged(sweep_config)));
      return exec_sweep(cfg, resolve_out_dir(sweep_out), resume, out);
    }
    if (*gen) {
      Scenario s;
      try {
        s = generate_scenario(gen_name, gen_seed);
      } catch (std::invalid_argument const& e) {
        throw ValidationError(e.what());
      }
      fs::path const dir = resolve_out_dir(gen_out);
      fs::create_directories(dir);
      fs::path const name = gen_file.value_or(gen_name + ".txt");
      if (name != name.filename() || name == "." || name == "..") {
        throw ValidationError("--file-name must be a plain file name");
      }
      fs::path const file = dir / name;
      save_scenario(file, s);
      out << "wrote " << file.string() << '\n';
      return kExitOk;
    }
    if (*analyze) {
      print_analysis(ages, table, out);
      return kExitOk;
    }
    if (*replay) {
      json const m = load_json_file(manifest_path);
      if (!m.contains("subcommand") || !m.contains("config")) {
        throw ValidationError("manifest: missing 'subcommand' or 'config'");
      }
      std::string const sub = m.at("subcommand").get<std::string>();
      std::optional<fs::path> recorded;
      if (m.contains("output_dir")) recorded = m.at("output_dir").get<std::string>();
      fs::path const dir = resolve_out_dir(replay_out, recorded);
      if (sub == "attack") return exec_attack(attack_config_from_json(m.at("config")), dir, out);
      if (sub == "sweep") return exec_sweep(sweep_config_from_json(m.at("config")), dir, false, out);
      throw ValidationError("manifest: cannot replay subcommand '" + sub + "'");
    }
  } catch (ParseError const& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitValidation;
  } catch (ValidationError const& e) {
    err << "invalid: " << e.what() << '\n';
    return kExitValidation;
  } catch (std::exception const& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace mothijack::cli
