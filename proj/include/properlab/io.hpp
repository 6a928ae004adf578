#pragma once

#include "properlab/game.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace properlab {

struct HashMismatch : std::runtime_error {
  HashMismatch(const std::string& expected, const std::string& got)
      : std::runtime_error("solution bound to problem " + got + ", not " + expected) {}
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

struct ProblemFile {
  FiniteProblem problem;
  std::map<std::string, Marginal> marginals;
  std::string hash;
};

namespace detail {

inline nlohmann::json problem_to_json(const FiniteProblem& p) {
  nlohmann::json j;
  j["domain"] = p.domain;
  j["labels"] = p.labels;
  nlohmann::json hyps = nlohmann::json::array();
  for (const auto& h : p.hypotheses) {
    nlohmann::json row = nlohmann::json::array();
    for (int y : h) row.push_back(p.labels[y]);
    hyps.push_back(row);
  }
  j["hypotheses"] = hyps;
  nlohmann::json loss = nlohmann::json::array();
  for (const auto& row : p.loss) {
    nlohmann::json r = nlohmann::json::array();
    for (const Rat& v : row) r.push_back(format_rational(v));
    loss.push_back(r);
  }
  j["loss"] = loss;
  return j;
}

inline Rat json_rational(const nlohmann::json& v, const char* what) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<long long>());
  throw ParseError(std::string(what) +
                   ": rationals must be \"p/q\"/decimal strings or integers "
                   "(floating-point JSON numbers are inexact)");
}

}  // namespace detail

// Canonical bytes of the problem content; marginals are not part of the
// identity a solution binds to.
inline std::string problem_hash(const FiniteProblem& p) {
  std::ostringstream out;
  out << "fnv1a64:" << std::hex;
  out.width(16);
  out.fill('0');
  out << fnv1a64(detail::problem_to_json(p).dump());
  return out.str();
}

inline ProblemFile parse_problem_json(const nlohmann::json& j) {
  ProblemFile file;
  try {
    if (!j.is_object()) throw ParseError("problem file must be a JSON object");
    for (const char* key : {"domain", "labels", "hypotheses", "loss"})
      if (!j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");

    file.problem.domain = j.at("domain").get<std::vector<std::string>>();
    file.problem.labels = j.at("labels").get<std::vector<std::string>>();

    std::map<std::string, int> label_index;
    for (std::size_t y = 0; y < file.problem.labels.size(); ++y)
      label_index[file.problem.labels[y]] = static_cast<int>(y);

    for (const auto& row : j.at("hypotheses")) {
      std::vector<int> h;
      for (const auto& cell : row) {
        auto it = label_index.find(cell.get<std::string>());
        if (it == label_index.end())
          throw ParseError("hypothesis output '" + cell.get<std::string>() + "' is not a label");
        h.push_back(it->second);
      }
      file.problem.hypotheses.push_back(std::move(h));
    }

    const auto& loss = j.at("loss");
    if (loss.is_string() && loss.get<std::string>() == "zero_one") {
      file.problem.loss =
          FiniteProblem::zero_one_loss(static_cast<int>(file.problem.labels.size()));
    } else if (loss.is_array()) {
      for (const auto& row : loss) {
        std::vector<Rat> r;
        for (const auto& cell : row) r.push_back(detail::json_rational(cell, "loss"));
        file.problem.loss.push_back(std::move(r));
      }
    } else {
      throw ParseError("loss must be \"zero_one\" or a matrix");
    }

    if (j.contains("marginals")) {
      for (const auto& [name, weights] : j.at("marginals").items()) {
        Marginal m;
        for (const auto& cell : weights) m.weights.push_back(detail::json_rational(cell, "marginal"));
        file.marginals[name] = std::move(m);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed problem file: ") + e.what());
  }

  validate_problem(file.problem);
  for (const auto& [name, m] : file.marginals) validate_marginal(m, file.problem);
  file.hash = problem_hash(file.problem);
  return file;
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON in '") + path + "': " + e.what());
  }
  return parse_problem_json(j);
}

inline void save_problem(const ProblemFile& file, const std::string& path) {
  nlohmann::json j = detail::problem_to_json(file.problem);
  nlohmann::json margs;
  for (const auto& [name, m] : file.marginals) {
    nlohmann::json w = nlohmann::json::array();
    for (const Rat& v : m.weights) w.push_back(format_rational(v));
    margs[name] = w;
  }
  if (!margs.is_null()) j["marginals"] = margs;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

struct SolutionFile {
  GameSolution solution;
  std::string problem_hash;
};

inline void save_solution(const SolutionFile& file, const std::string& path) {
  nlohmann::json j;
  j["format"] = "properlab-solution/1";
  j["problem_hash"] = file.problem_hash;
  j["marginal"] = file.solution.marginal_name;
  j["n"] = file.solution.n;
  j["method"] = method_name(file.solution.method);
  j["value"] = format_rational(file.solution.value);
  nlohmann::json prior = nlohmann::json::array();
  for (const Rat& w : file.solution.adversary_prior.weights) prior.push_back(format_rational(w));
  j["prior"] = prior;
  j["duality_gap"] = format_rational(file.solution.duality_gap);
  j["converged"] = file.solution.converged;
  j["degenerate"] = file.solution.degenerate;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

inline SolutionFile load_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
    SolutionFile file;
    file.problem_hash = j.at("problem_hash").get<std::string>();
    file.solution.marginal_name = j.at("marginal").get<std::string>();
    file.solution.n = j.at("n").get<int>();
    file.solution.method = j.at("method").get<std::string>() == "exact_lp"
                               ? SolveMethod::ExactLp
                               : SolveMethod::MultiplicativeWeights;
    file.solution.value = parse_rational(j.at("value").get<std::string>());
    for (const auto& cell : j.at("prior"))
      file.solution.adversary_prior.weights.push_back(
          parse_rational(cell.get<std::string>()));
    file.solution.duality_gap = parse_rational(j.at("duality_gap").get<std::string>());
    file.solution.converged = j.at("converged").get<bool>();
    file.solution.degenerate = j.at("degenerate").get<bool>();
    return file;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid solution file '") + path + "': " + e.what());
  }
}

// One certification row: quantity, the two compared sides, their ratio and
// the verdict. Diff-friendly CSV, one property per line.
struct CsvRow {
  std::string instance;
  std::string quantity;
  std::string lhs;
  std::string rhs;
  std::string ratio;
  std::string verdict;
};

inline std::string csv_header() { return "instance,quantity,lhs,rhs,ratio,verdict"; }

inline std::string to_csv_line(const CsvRow& r) {
  return r.instance + "," + r.quantity + "," + r.lhs + "," + r.rhs + "," + r.ratio + "," +
         r.verdict;
}

inline void write_csv(const std::vector<CsvRow>& rows, const std::string& path) {
  std::ofstream out(path);
  out << csv_header() << "\n";
  for (const auto& r : rows) out << to_csv_line(r) << "\n";
}

}  // namespace properlab
