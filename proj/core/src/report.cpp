#include "treeweave/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "treeweave/errors.hpp"

namespace treeweave {

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

LambdaStats stats_of(std::span<const double> xs) {
  LambdaStats s;
  s.min = xs[0];
  s.max = xs[0];
  double sum = 0.0;
  for (const double x : xs) {
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
    sum += x;
  }
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double acc = 0.0;
    for (const double x : xs) acc += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(xs.size() - 1));
  }
  return s;
}

}  // namespace

SummaryStats summarize(std::span<const RoundTrace> traces) {
  if (traces.empty()) {
    throw DomainError("summarize requires at least one trace record");
  }
  std::vector<double> pooled;
  pooled.reserve(traces.size());
  std::map<std::size_t, std::vector<double>> by_run;
  for (const RoundTrace& t : traces) {
    pooled.push_back(t.lambda2);
    by_run[t.run].push_back(t.lambda2);
  }
  SummaryStats out;
  out.pooled = stats_of(pooled);
  for (const auto& [run, xs] : by_run) out.per_run.push_back(stats_of(xs));
  return out;
}

std::string traces_to_csv(std::span<const RoundTrace> traces) {
  std::ostringstream os;
  os << "run,round,phase,population,lambda2,swaps,disconnected\n";
  for (const RoundTrace& t : traces) {
    os << t.run << ',' << t.round << ',' << phase_name(t.phase) << ',' << t.population
       << ',' << format_double(t.lambda2) << ',' << t.swaps << ','
       << (t.disconnected ? 1 : 0) << '\n';
  }
  return os.str();
}

std::vector<RoundTrace> traces_from_csv(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  if (!std::getline(is, line) || line != "run,round,phase,population,lambda2,swaps,disconnected") {
    throw DomainError("trace CSV is missing the expected header");
  }
  std::vector<RoundTrace> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 7) {
      throw DomainError("trace CSV row has " + std::to_string(fields.size()) +
                        " fields, expected 7");
    }
    try {
      RoundTrace t;
      t.run = std::stoull(fields[0]);
      t.round = std::stoull(fields[1]);
      t.phase = phase_from_name(fields[2]);
      t.population = std::stoull(fields[3]);
      t.lambda2 = std::stod(fields[4]);
      t.swaps = std::stoull(fields[5]);
      t.disconnected = fields[6] == "1";
      if (!t.disconnected && fields[6] != "0") {
        throw DomainError("disconnected flag must be 0 or 1");
      }
      out.push_back(t);
    } catch (const std::invalid_argument&) {
      throw DomainError("trace CSV row has a malformed number: " + line);
    } catch (const std::out_of_range&) {
      throw DomainError("trace CSV row has an out-of-range number: " + line);
    }
  }
  return out;
}

std::string summary_to_json(const ScenarioConfig& config, const SummaryStats& stats) {
  nlohmann::json j;
  j["config"] = {
      {"leaves", config.initial_leaves},
      {"rounds", config.total_rounds},
      {"runs", config.runs},
      {"churn", config.churn_fraction},
      {"cycle", config.cycle_length},
      {"adversary", adversary_name(config.adversary)},
      {"seed", config.seed},
  };
  j["pooled"] = {
      {"min", stats.pooled.min},
      {"max", stats.pooled.max},
      {"mean", stats.pooled.mean},
      {"stddev", stats.pooled.stddev},
  };
  j["per_run"] = nlohmann::json::array();
  for (std::size_t i = 0; i < stats.per_run.size(); ++i) {
    const LambdaStats& s = stats.per_run[i];
    j["per_run"].push_back({
        {"run", i},
        {"min", s.min},
        {"max", s.max},
        {"mean", s.mean},
        {"stddev", s.stddev},
    });
  }
  return j.dump(2) + "\n";
}

std::string run_to_gnuplot(std::span<const RoundTrace> traces, std::size_t run) {
  std::ostringstream os;
  for (const RoundTrace& t : traces) {
    if (t.run != run) continue;
    os << t.round << ' ' << format_double(t.lambda2) << '\n';
  }
  return os.str();
}

}  // namespace treeweave
