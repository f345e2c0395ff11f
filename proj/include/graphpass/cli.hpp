#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "graphpass/io.hpp"

namespace graphpass {

enum ExitCode {
  kExitOk = 0,
  kExitInputError = 1,
  kExitAuditFailure = 2,
  kExitFoundFewer = 3,
};

struct RunManifest {
  std::string command;  // validate | audit | solve | verify | report
  std::string graph_path;
  std::string model_path;
  std::string solutions_path;
  std::string out_dir = ".";
  int K = 3;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::string method = "both";  // newton | mp | both
};

namespace detail {

inline void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw MissingInput("missing required input: " + what);
  if (!std::filesystem::exists(path)) throw MissingInput(what + " does not exist: " + path);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline void write_sidecar_meta(const std::filesystem::path& dir) {
  nlohmann::ordered_json meta;
  meta["schema"] = kSchemaVersion;
  meta["timestamp_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(
          std::chrono::system_clock::now().time_since_epoch()).count();
  write_text(dir / "meta.json", meta.dump(2) + "\n");
}

inline SolverConfig solver_config(const RunManifest& mf) {
  SolverConfig cfg;
  cfg.tol_residual = mf.tol;
  cfg.seed = mf.seed;
  cfg.use_mountain_pass = mf.method != "newton";
  cfg.use_newton = mf.method != "mp";
  return cfg;
}

}  // namespace detail

inline int run_validate(const RunManifest& mf, std::ostream& out) {
  detail::require_file(mf.graph_path, "--graph");
  WeightedGraph g = read_graph_file(mf.graph_path);
  out << "graph ok: " << g.size() << " vertices, " << g.edges().size()
      << " edges, mu_min " << g.mu_min() << ", connected, no self-loops\n";
  return kExitOk;
}

inline int run_audit(const RunManifest& mf, std::ostream& out) {
  detail::require_file(mf.graph_path, "--graph");
  detail::require_file(mf.model_path, "--model");
  WeightedGraph g = read_graph_file(mf.graph_path);
  ParsedModel pm = read_model_file(mf.model_path, g);
  if (mf.seed != 0) pm.plan.seed = mf.seed;
  AuditReport rep = audit(g, pm.model, pm.plan);

  std::filesystem::create_directories(mf.out_dir);
  detail::write_text(std::filesystem::path(mf.out_dir) / "audit.json",
                     audit_to_json(rep).dump(2) + "\n");
  detail::write_sidecar_meta(mf.out_dir);

  out << "hypothesis audit (theta = " << rep.theta << ", alpha_* = " << rep.alpha_star << ")\n";
  for (const auto& [name, hr] : rep.hypotheses) {
    out << "  " << name << ": " << to_string(hr.verdict);
    if (hr.witness)
      out << "  [witness x=" << hr.witness->x << " s=" << hr.witness->s
          << " t=" << hr.witness->t << ": " << hr.witness->detail << "]";
    if (!hr.note.empty()) out << "  (" << hr.note << ")";
    out << "\n";
  }
  return rep.all_checked_pass ? kExitOk : kExitAuditFailure;
}

inline int run_solve(const RunManifest& mf, std::ostream& out) {
  detail::require_file(mf.graph_path, "--graph");
  detail::require_file(mf.model_path, "--model");
  WeightedGraph g = read_graph_file(mf.graph_path);
  ParsedModel pm = read_model_file(mf.model_path, g);
  AuditReport rep = audit(g, pm.model, pm.plan);
  std::filesystem::create_directories(mf.out_dir);
  detail::write_text(std::filesystem::path(mf.out_dir) / "audit.json",
                     audit_to_json(rep).dump(2) + "\n");
  if (!rep.all_checked_pass) {
    out << "audit failed; not solving\n";
    return kExitAuditFailure;
  }

  SolverConfig cfg = detail::solver_config(mf);
  EnumerateResult res = enumerate_solutions(g, pm.model, cfg, mf.K, rep.even_ok());

  nlohmann::ordered_json solutions = nlohmann::ordered_json::array();
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::array();
  for (const auto& rec : res.selected) {
    solutions.push_back(record_to_json(g, rec));
    nlohmann::ordered_json d = diagnostics_to_json(g, pm.model, rec.state);
    d["id"] = rec.id;
    diagnostics.push_back(d);
  }
  nlohmann::ordered_json top;
  top["schema"] = kSchemaVersion;
  top["solutions"] = solutions;
  std::filesystem::path dir(mf.out_dir);
  detail::write_text(dir / "solutions.json", top.dump(2) + "\n");
  detail::write_text(dir / "diagnostics.json", diagnostics.dump(2) + "\n");
  write_energy_csv((dir / "energy.csv").string(), res.selected);
  detail::write_sidecar_meta(dir);

  out << "found " << res.selected.size() << " solution pair(s) at distinct energies ("
      << res.all_accepted.size() << " roots total)\n";
  for (std::size_t i = 0; i < res.selected.size(); ++i)
    out << "  k=" << (i + 1) << "  phi=" << res.selected[i].energy
        << "  residual_sup=" << res.selected[i].residual_sup
        << "  method=" << res.selected[i].method << "\n";
  return res.found_fewer ? kExitFoundFewer : kExitOk;
}

inline int run_verify(const RunManifest& mf, std::ostream& out) {
  detail::require_file(mf.graph_path, "--graph");
  detail::require_file(mf.model_path, "--model");
  detail::require_file(mf.solutions_path, "--solutions");
  WeightedGraph g = read_graph_file(mf.graph_path);
  ParsedModel pm = read_model_file(mf.model_path, g);

  std::ifstream in(mf.solutions_path);
  nlohmann::json top = nlohmann::json::parse(in);
  if (!top.contains("schema") || top["schema"] != kSchemaVersion)
    throw MalformedFile(mf.solutions_path + ": unsupported schema");

  bool all_ok = true;
  for (const auto& jrec : top["solutions"]) {
    StatePair s(function_from_json(g, jrec["u"]), function_from_json(g, jrec["v"]));
    StatePair r = residual(g, pm.model, s);
    int worst = 0;
    double worst_abs = 0.0;
    for (int x = 0; x < g.size(); ++x) {
      double a = std::max(std::abs(r.u(x)), std::abs(r.v(x)));
      if (a > worst_abs) { worst_abs = a; worst = x; }
    }
    double energy = phi(g, pm.model, s).total;
    bool ok = worst_abs <= mf.tol;
    double stored_energy = jrec["energy"].get<double>();
    if (std::abs(energy - stored_energy) > 1e-8 * (1.0 + std::abs(energy))) ok = false;
    out << "solution " << jrec["id"] << ": " << (ok ? "ok" : "FAIL")
        << "  residual_sup=" << worst_abs << "  phi=" << energy;
    if (!ok) out << "  worst vertex: " << g.id(worst);
    out << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok ? kExitOk : kExitInputError;
}

inline int run_report(const RunManifest& mf, std::ostream& out) {
  std::filesystem::path dir(mf.out_dir);
  std::filesystem::path sol = dir / "solutions.json";
  if (!std::filesystem::exists(sol))
    throw MissingInput("no solutions.json in " + mf.out_dir + "; run solve first");
  std::ifstream in(sol);
  nlohmann::json top = nlohmann::json::parse(in);

  std::ostringstream table;
  table << "k      phi                     residual_sup       method\n";
  int k = 0;
  for (const auto& jrec : top["solutions"]) {
    char line[160];
    std::snprintf(line, sizeof line, "%-6d %-23.16g %-18.3e %s\n", ++k,
                  jrec["energy"].get<double>(), jrec["residual_sup"].get<double>(),
                  jrec["method"].get<std::string>().c_str());
    table << line;
  }
  detail::write_text(dir / "report.txt", table.str());
  out << table.str();
  return kExitOk;
}

inline int run(const RunManifest& mf, std::ostream& out) {
  if (mf.command == "validate") return run_validate(mf, out);
  if (mf.command == "audit") return run_audit(mf, out);
  if (mf.command == "solve") return run_solve(mf, out);
  if (mf.command == "verify") return run_verify(mf, out);
  if (mf.command == "report") return run_report(mf, out);
  throw UnknownFlag("unknown command: " + mf.command);
}

/// Top-level entry shared by the CLI binary and the tests: maps errors to
/// the documented exit codes with machine-readable reason strings.
inline int run_checked(const RunManifest& mf, std::ostream& out, std::ostream& err) {
  try {
    return run(mf, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace graphpass
