#pragma once

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "curvlab/json_io.hpp"

namespace curvlab {

namespace cli_detail {

inline std::vector<int> parse_signs(const std::string& s) {
  if (s == "both") return {1, -1};
  if (s == "+" || s == "+1") return {1};
  if (s == "-" || s == "-1") return {-1};
  throw UsageError("--sign expects +, - or both");
}

inline size_t cache_limit_from_env() {
  if (const char* env = std::getenv("CURVLAB_CACHE_LIMIT")) {
    try {
      const unsigned long long v = std::stoull(env);
      if (v > 0) return static_cast<size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("CURVLAB_CACHE_LIMIT must be a positive integer");
  }
  return kDefaultCacheLimit;
}

inline std::vector<size_t> parse_size_list(const std::string& s, const char* what) {
  std::vector<size_t> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.push_back(std::stoul(part));
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": bad integer '" + part + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string(what) + ": empty list");
  return out;
}

// quantity specs: "A:k=1", "E:k=2,i=3,X=1,Y=3", "T:k=2,p=0,q=0,r=1,X=3,Y=3",
// "component:k=2,idx=1,2,3,4,1,2", "pfaffian"
struct QuantitySpec {
  std::string tag;
  std::map<std::string, long> params;
  std::vector<size_t> idx;  // component only, 1-based
};

inline QuantitySpec parse_quantity_spec(const std::string& text) {
  QuantitySpec spec;
  const auto colon = text.find(':');
  spec.tag = text.substr(0, colon);
  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string token;
  bool in_idx = false;
  while (std::getline(ss, token, ',')) {
    const auto eq = token.find('=');
    if (eq != std::string::npos) {
      const std::string key = token.substr(0, eq);
      const std::string val = token.substr(eq + 1);
      if (key == "idx") {
        in_idx = true;
        spec.idx.push_back(std::stoul(val));
        continue;
      }
      in_idx = false;
      try {
        spec.params[key] = std::stol(val);
      } catch (const std::exception&) {
        throw UsageError("bad value in quantity spec token '" + token + "'");
      }
    } else if (in_idx) {
      try {
        spec.idx.push_back(std::stoul(token));
      } catch (const std::exception&) {
        throw UsageError("bad index in quantity spec token '" + token + "'");
      }
    } else {
      throw UsageError("bad quantity spec token '" + token + "'");
    }
  }
  return spec;
}

inline long need(const QuantitySpec& s, const std::string& key) {
  auto it = s.params.find(key);
  if (it == s.params.end())
    throw UsageError("quantity spec '" + s.tag + "' needs parameter " + key);
  return it->second;
}

inline Scalar evaluate_quantity(const PointModel& model, const QuantitySpec& spec,
                                size_t cache_limit) {
  if (spec.tag == "pfaffian") return omega_pfaffian(model);
  QuantityEvaluator eval(model, cache_limit);
  if (spec.tag == "component") {
    const long k = need(spec, "k");
    if (k < 0) throw UsageError("component spec needs k >= 0");
    IndexTuple t;
    for (size_t v : spec.idx) {
      if (v < 1 || v > model.dim) throw UsageError("component index out of range");
      t.push_back(static_cast<uint8_t>(v - 1));
    }
    if (t.size() != 2 * static_cast<size_t>(k) + 2)
      throw DomainError("index arity mismatch");
    return eval.component(t);
  }
  NamedQuantity q;
  if (spec.tag == "A")
    q = NamedQuantity::a(static_cast<unsigned>(need(spec, "k")));
  else if (spec.tag == "B")
    q = NamedQuantity::b(static_cast<unsigned>(need(spec, "k")));
  else if (spec.tag == "C")
    q = NamedQuantity::c(static_cast<unsigned>(need(spec, "k")));
  else if (spec.tag == "D")
    q = NamedQuantity::d(static_cast<unsigned>(need(spec, "k")));
  else if (spec.tag == "E")
    q = NamedQuantity::e(static_cast<unsigned>(need(spec, "k")),
                         static_cast<unsigned>(need(spec, "i")),
                         static_cast<size_t>(need(spec, "X")),
                         static_cast<size_t>(need(spec, "Y")));
  else if (spec.tag == "T" || spec.tag == "U" || spec.tag == "Uhat") {
    q = NamedQuantity::t(static_cast<unsigned>(need(spec, "k")),
                         static_cast<unsigned>(need(spec, "p")),
                         static_cast<unsigned>(need(spec, "q")),
                         static_cast<unsigned>(need(spec, "r")),
                         static_cast<size_t>(need(spec, "X")),
                         static_cast<size_t>(need(spec, "Y")));
    if (spec.tag == "U") q.tag = NamedQuantity::Tag::U;
    if (spec.tag == "Uhat") q.tag = NamedQuantity::Tag::Uhat;
  } else {
    throw UsageError("unknown quantity tag '" + spec.tag +
                     "'; expected A|B|C|D|E|T|U|Uhat|component|pfaffian");
  }
  return eval.eval(q);
}

inline void print_summary(const std::vector<LemmaReport>& reports) {
  for (const auto& r : reports) {
    std::string params;
    for (const auto& [k, v] : r.params) params += " " + k + "=" + v;
    std::cerr << (r.pass ? "pass" : "FAIL") << "  " << r.lemma << " [" << r.mode << "]"
              << params << "  residuals=" << r.residuals.size() << "  " << r.ms
              << "ms\n";
    if (!r.pass)
      for (const auto& res : r.residuals)
        if (!res.zero)
          std::cerr << "       nonzero: " << res.desc << " = " << res.value << "\n";
  }
}

}  // namespace cli_detail

// Exit codes: 0 all pass, 1 mathematical failure, 2 usage/config error,
// 3 model-invariant violation.
inline int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"curvlab: exact verification of pointwise curvature identities "
               "on Lorentzian models with an almost symplectic form"};
  app.require_subcommand(1);

  // verify ------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "run registered identity checks");
  std::string verify_id;
  verify->add_option("check", verify_id, "check id or 'all'")->required();
  unsigned k_max = 6;
  verify->add_option("--k-max", k_max, "largest action depth (default 6)");
  std::string sign = "both";
  verify->add_option("--sign", sign, "+, - or both (default both)");
  std::string mode = "exact";
  verify->add_option("--mode", mode, "exact or float (default exact)");
  double tol = kDefaultTol;
  verify->add_option("--tol", tol, "float-mode tolerance (default 1e-9)");
  uint64_t seed = 1;
  verify->add_option("--seed", seed, "seed for randomized parts (default 1)");
  unsigned parallelism = 1;
  verify->add_option("--parallelism", parallelism, "worker threads (default 1)");
  std::string out_path;
  verify->add_option("--out", out_path, "write the JSON report array here");
  bool timing = false;
  verify->add_flag("--timing", timing,
                   "record measured milliseconds in the report file (off keeps "
                   "reports byte-identical across runs)");

  // eval --------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "evaluate one quantity on a model");
  std::string model_path, quantity_spec;
  eval_cmd->add_option("model", model_path, "model JSON file")->required();
  eval_cmd->add_option("quantity", quantity_spec,
                       "e.g. \"A:k=1\" or \"component:k=2,idx=1,2,3,4,1,2\"")
      ->required();
  std::string eval_out;
  eval_cmd->add_option("--out", eval_out, "also write {spec, value} JSON here");

  // search ------------------------------------------------------------
  auto* search = app.add_subcommand("search", "numeric rank-theorem sweep");
  std::string sweep_path;
  search->add_option("sweep", sweep_path, "sweep spec JSON file")->required();
  std::string search_out;
  search->add_option("--out", search_out, "write the JSON report here");
  unsigned search_par = 1;
  search->add_option("--parallelism", search_par, "worker threads (default 1)");
  bool search_timing = false;
  search->add_flag("--timing", search_timing, "record measured milliseconds");

  // jet ---------------------------------------------------------------
  auto* jet = app.add_subcommand("jet", "signed-sum identity on polynomial jets");
  unsigned jet_k = 1;
  jet->add_option("--k", jet_k, "iterated-action depth (default 1)");
  std::string jet_config;
  jet->add_option("--config", jet_config, "jet spec JSON (otherwise random jets)");
  unsigned jet_trials = 100;
  jet->add_option("--trials", jet_trials, "random jets to test (default 100)");
  std::string jet_dims = "2,3,4";
  jet->add_option("--dims", jet_dims, "dimensions for random jets (default 2,3,4)");
  unsigned jet_degree = 0;
  jet->add_option("--degree", jet_degree, "jet order (default 2k)");
  uint64_t jet_seed = 7;
  jet->add_option("--seed", jet_seed, "seed (default 7)");
  std::string jet_pairs = "";
  jet->add_option("--pairs", jet_pairs, "config mode: k pairs 'u,v;u,v;..' (1-based)");
  std::string jet_ys = "";
  jet->add_option("--ys", jet_ys, "config mode: field arguments 'c1,c2,..' (1-based)");
  std::string jet_out;
  jet->add_option("--out", jet_out, "write the JSON report here");
  bool jet_timing = false;
  jet->add_flag("--timing", jet_timing, "record measured milliseconds");

  // report-merge --------------------------------------------------------
  auto* merge = app.add_subcommand("report-merge", "merge report files");
  std::string merge_out;
  merge->add_option("--out", merge_out, "merged output path")->required();
  std::vector<std::string> merge_inputs;
  merge->add_option("inputs", merge_inputs, "report JSON files")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const size_t cache_limit = cli_detail::cache_limit_from_env();

    if (*verify) {
      CheckOptions opt;
      opt.k_max = k_max;
      opt.signs = cli_detail::parse_signs(sign);
      if (mode != "exact" && mode != "float")
        throw UsageError("--mode expects exact or float");
      opt.mode = mode;
      if (tol <= 0) throw UsageError("--tol must be positive");
      opt.tol = tol;
      opt.seed = seed;
      opt.parallelism = std::max(1u, parallelism);
      opt.cache_limit = cache_limit;
      std::vector<LemmaReport> reports;
      if (verify_id == "all")
        reports = run_all_checks(opt);
      else
        reports = run_check(verify_id, opt);
      cli_detail::print_summary(reports);
      if (!out_path.empty())
        write_json_file(out_path, reports_to_json(reports, timing));
      return all_pass(reports) ? 0 : 1;
    }

    if (*eval_cmd) {
      const PointModel model = model_from_json(read_json_file(model_path));
      const cli_detail::QuantitySpec spec = cli_detail::parse_quantity_spec(quantity_spec);
      const Scalar value = cli_detail::evaluate_quantity(model, spec, cache_limit);
      std::cout << value.str() << "\n";
      if (!eval_out.empty()) {
        Json j = Json::object();
        j["spec"] = quantity_spec;
        j["value"] = scalar_to_json(value);
        write_json_file(eval_out, j);
      }
      return 0;
    }

    if (*search) {
      const SweepSpec spec = sweep_from_json(read_json_file(sweep_path));
      const auto t0 = std::chrono::steady_clock::now();
      LemmaReport rep = theorem_search_sweep(spec, std::max(1u, search_par));
      rep.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
      std::vector<LemmaReport> reports{rep};
      cli_detail::print_summary(reports);
      if (!search_out.empty())
        write_json_file(search_out, reports_to_json(reports, search_timing));
      return rep.pass ? 0 : 1;
    }

    if (*jet) {
      std::vector<LemmaReport> reports;
      const auto jet_t0 = std::chrono::steady_clock::now();
      if (!jet_config.empty()) {
        const JetModel jm = jet_from_json(read_json_file(jet_config));
        if (jm.order() < 2 * jet_k)
          throw DomainError("jet order too low for requested derivative count");
        std::vector<std::pair<size_t, size_t>> pairs;
        if (!jet_pairs.empty()) {
          std::stringstream ss(jet_pairs);
          std::string part;
          while (std::getline(ss, part, ';')) {
            const auto uv = cli_detail::parse_size_list(part, "--pairs");
            if (uv.size() != 2) throw UsageError("--pairs wants 'u,v' pairs");
            if (uv[0] < 1 || uv[0] > jm.dim() || uv[1] < 1 || uv[1] > jm.dim())
              throw UsageError("--pairs index out of range");
            pairs.emplace_back(uv[0] - 1, uv[1] - 1);
          }
        }
        while (pairs.size() < jet_k)
          pairs.emplace_back(0, jm.dim() > 1 ? 1 : 0);
        if (pairs.size() != jet_k) throw UsageError("--pairs must give exactly k pairs");
        std::vector<size_t> ys(jm.field_arity(), 0);
        if (!jet_ys.empty()) {
          const auto parsed = cli_detail::parse_size_list(jet_ys, "--ys");
          if (parsed.size() != jm.field_arity())
            throw UsageError("--ys must match the field arity");
          for (size_t i = 0; i < parsed.size(); ++i) {
            if (parsed[i] < 1 || parsed[i] > jm.dim())
              throw UsageError("--ys index out of range");
            ys[i] = parsed[i] - 1;
          }
        }
        reports.push_back(verify_signed_sum(jm, jet_k, pairs, ys));
      } else {
        const auto dims = cli_detail::parse_size_list(jet_dims, "--dims");
        for (size_t d : dims)
          if (d < 2) throw UsageError("--dims entries must be at least 2");
        const unsigned degree = jet_degree == 0 ? 2 * jet_k : jet_degree;
        reports.push_back(
            check_signed_sum_campaign(jet_k, jet_trials, dims, degree, jet_seed));
      }
      for (auto& r : reports)
        r.ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - jet_t0)
                   .count();
      cli_detail::print_summary(reports);
      if (!jet_out.empty())
        write_json_file(jet_out, reports_to_json(reports, jet_timing));
      return all_pass(reports) ? 0 : 1;
    }

    if (*merge) {
      std::vector<Json> entries;
      bool all_ok = true;
      for (const auto& path : merge_inputs) {
        const Json arr = read_json_file(path);
        if (!arr.is_array())
          throw UsageError("'" + path + "' is not a report array");
        for (const auto& entry : arr) {
          if (entry.value("verdict", "fail") != "pass") all_ok = false;
          entries.push_back(entry);
        }
      }
      std::stable_sort(entries.begin(), entries.end(),
                       [](const Json& a, const Json& b) {
                         const std::string la = a.value("lemma", ""), lb = b.value("lemma", "");
                         if (la != lb) return la < lb;
                         return a.value("params", Json::object()).dump() <
                                b.value("params", Json::object()).dump();
                       });
      Json out = Json::array();
      for (auto& e : entries) out.push_back(std::move(e));
      write_json_file(merge_out, out);
      return all_ok ? 0 : 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace curvlab
