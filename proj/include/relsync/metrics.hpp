#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "relsync/runlog.hpp"
#include "relsync/types.hpp"

namespace relsync {

struct ErrorStats {
  long samples = 0;
  double rmse = 0.0;
  double stddev = 0.0;
  double max_abs = 0.0;
};

inline ErrorStats error_stats(const std::vector<double>& errs) {
  ErrorStats s;
  s.samples = static_cast<long>(errs.size());
  if (errs.empty()) return s;
  double sum = 0.0, sum_sq = 0.0;
  for (double e : errs) {
    sum += e;
    sum_sq += e * e;
    s.max_abs = std::max(s.max_abs, std::abs(e));
  }
  const double n = static_cast<double>(errs.size());
  s.rmse = std::sqrt(sum_sq / n);
  if (errs.size() > 1) {
    const double mean = sum / n;
    double acc = 0.0;
    for (double e : errs) acc += (e - mean) * (e - mean);
    s.stddev = std::sqrt(acc / (n - 1.0));
  }
  return s;
}

struct AgentMetrics {
  AgentId agent = 0;
  bool is_parent = true;
  long samples = 0;
  ErrorStats offset;    // seconds
  ErrorStats skew;      // dimensionless ratio
  ErrorStats position;  // meters, stats over the error norm
};

struct PairMetrics {
  AgentId a = 0, b = 0;
  long samples = 0;
  ErrorStats range;  // meters
};

struct MetricsReport {
  double warmup = 0.0;
  double frequency_hz = 0.0;
  std::vector<AgentMetrics> agents;
  std::vector<PairMetrics> pairs;
};

inline MetricsReport compute_metrics(const RunLog& log, double warmup) {
  std::map<AgentId, std::pair<bool, std::vector<std::array<double, 3>>>> per_agent;
  for (const AgentFrameRecord& r : log.records) {
    if (!r.valid || r.t < warmup) continue;
    auto& slot = per_agent[r.agent];
    slot.first = r.is_parent;
    const double ex = r.pos_x_est - r.pos_x_true;
    const double ey = r.pos_y_est - r.pos_y_true;
    slot.second.push_back({r.offset_est - r.offset_true, r.skew_est - r.skew_true,
                           std::sqrt(ex * ex + ey * ey)});
  }
  std::map<std::pair<AgentId, AgentId>, std::vector<double>> per_pair;
  for (const RangeRecord& r : log.ranges) {
    if (r.t < warmup) continue;
    const auto key = std::minmax(r.a, r.b);
    per_pair[{key.first, key.second}].push_back(r.range_est - r.range_true);
  }

  MetricsReport rep;
  rep.warmup = warmup;
  rep.frequency_hz = log.meta.frequency_hz;
  for (const auto& [id, slot] : per_agent) {
    AgentMetrics m;
    m.agent = id;
    m.is_parent = slot.first;
    m.samples = static_cast<long>(slot.second.size());
    std::vector<double> off, skew, pos;
    off.reserve(slot.second.size());
    skew.reserve(slot.second.size());
    pos.reserve(slot.second.size());
    for (const auto& e : slot.second) {
      off.push_back(e[0]);
      skew.push_back(e[1]);
      pos.push_back(e[2]);
    }
    m.offset = error_stats(off);
    m.skew = error_stats(skew);
    m.position = error_stats(pos);
    rep.agents.push_back(m);
  }
  for (const auto& [key, errs] : per_pair) {
    PairMetrics p;
    p.a = key.first;
    p.b = key.second;
    p.samples = static_cast<long>(errs.size());
    p.range = error_stats(errs);
    rep.pairs.push_back(p);
  }
  if (rep.agents.empty()) throw std::runtime_error("metrics: no valid records after warmup");
  return rep;
}

inline std::string metrics_csv(const MetricsReport& rep) {
  std::string out =
      "agent,is_parent,samples,offset_rmse,offset_std,skew_rmse,skew_std,"
      "pos_rmse,pos_std,pos_max\n";
  for (const AgentMetrics& m : rep.agents) {
    out += std::to_string(m.agent);
    out += ',';
    out += m.is_parent ? '1' : '0';
    out += ',';
    out += std::to_string(m.samples);
    out += ',';
    out += format_double(m.offset.rmse);
    out += ',';
    out += format_double(m.offset.stddev);
    out += ',';
    out += format_double(m.skew.rmse);
    out += ',';
    out += format_double(m.skew.stddev);
    out += ',';
    out += format_double(m.position.rmse);
    out += ',';
    out += format_double(m.position.stddev);
    out += ',';
    out += format_double(m.position.max_abs);
    out += '\n';
  }
  out += "pair_a,pair_b,samples,range_rmse,range_std,range_max\n";
  for (const PairMetrics& p : rep.pairs) {
    out += std::to_string(p.a);
    out += ',';
    out += std::to_string(p.b);
    out += ',';
    out += std::to_string(p.samples);
    out += ',';
    out += format_double(p.range.rmse);
    out += ',';
    out += format_double(p.range.stddev);
    out += ',';
    out += format_double(p.range.max_abs);
    out += '\n';
  }
  return out;
}

// Human-readable summary: offsets in ns, skews in ppm, distances in cm.
inline std::string metrics_table(const MetricsReport& rep) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof(line), "post-warmup metrics (warmup %.3g s, frame rate %.6g Hz)\n",
                rep.warmup, rep.frequency_hz);
  out += line;
  out +=
      "agent  role    offset rmse/std [ns]   skew rmse/std [ppm]    pos rmse/std/max "
      "[cm]      n\n";
  for (const AgentMetrics& m : rep.agents) {
    std::snprintf(line, sizeof(line),
                  "%-6d %-7s %9.4f /%9.4f  %9.5f /%9.5f  %8.3f /%8.3f /%8.3f %6ld\n", m.agent,
                  m.is_parent ? "parent" : "child", m.offset.rmse * 1e9, m.offset.stddev * 1e9,
                  m.skew.rmse * 1e6, m.skew.stddev * 1e6, m.position.rmse * 1e2,
                  m.position.stddev * 1e2, m.position.max_abs * 1e2, m.samples);
    out += line;
  }
  if (!rep.pairs.empty()) {
    out += "pair        range rmse/std/max [cm]        n\n";
    for (const PairMetrics& p : rep.pairs) {
      std::snprintf(line, sizeof(line), "%3d-%-3d  %8.3f /%8.3f /%8.3f  %8ld\n", p.a, p.b,
                    p.range.rmse * 1e2, p.range.stddev * 1e2, p.range.max_abs * 1e2, p.samples);
      out += line;
    }
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::runtime_error("csv: missing column '" + name + "'");
  }
};

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  size_t start = 0;
  bool first = true;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    start = end + 1;
    if (line.empty()) continue;
    if (first) {
      t.header = split_csv_line(line);
      first = false;
    } else {
      t.rows.push_back(split_csv_line(line));
    }
  }
  if (first) throw std::runtime_error("csv: empty file");
  return t;
}

inline double csv_num(const std::vector<std::string>& row, int col) {
  return std::stod(row.at(static_cast<size_t>(col)));
}

}  // namespace detail

// Rebuild enough of a run log from its exported CSV text to compute metrics.
// ranges_text may be empty.
inline RunLog parse_runlog_files(const std::string& runlog_text, const std::string& truth_text,
                                 const std::string& ranges_text) {
  using detail::csv_num;
  RunLog log;
  detail::CsvTable est = detail::parse_csv(runlog_text);
  detail::CsvTable tru = detail::parse_csv(truth_text);
  const int ef = est.column("frame"), et = est.column("t"), ea = est.column("agent"),
            ep = est.column("is_parent"), ev = est.column("valid"), eh = est.column("held"),
            ex = est.column("pos_x"), ey = est.column("pos_y"), eo = est.column("offset"),
            es = est.column("skew");
  const int tf = tru.column("frame"), ta = tru.column("agent"), tx = tru.column("pos_x"),
            ty = tru.column("pos_y"), to = tru.column("offset"), ts = tru.column("skew");

  std::map<std::pair<long, int>, std::array<double, 4>> truth;
  for (const auto& row : tru.rows) {
    const long frame = std::stol(row.at(static_cast<size_t>(tf)));
    const int agent = static_cast<int>(std::stol(row.at(static_cast<size_t>(ta))));
    truth[{frame, agent}] = {csv_num(row, tx), csv_num(row, ty), csv_num(row, to),
                             csv_num(row, ts)};
  }
  for (const auto& row : est.rows) {
    AgentFrameRecord r;
    r.frame = std::stol(row.at(static_cast<size_t>(ef)));
    r.t = csv_num(row, et);
    r.agent = static_cast<int>(std::stol(row.at(static_cast<size_t>(ea))));
    r.is_parent = row.at(static_cast<size_t>(ep)) == "1";
    r.valid = row.at(static_cast<size_t>(ev)) == "1";
    r.held = row.at(static_cast<size_t>(eh)) == "1";
    r.pos_x_est = csv_num(row, ex);
    r.pos_y_est = csv_num(row, ey);
    r.offset_est = csv_num(row, eo);
    r.skew_est = csv_num(row, es);
    auto it = truth.find({r.frame, r.agent});
    if (it == truth.end())
      throw std::runtime_error("truth csv: no row for frame " + std::to_string(r.frame) +
                               " agent " + std::to_string(r.agent));
    r.pos_x_true = it->second[0];
    r.pos_y_true = it->second[1];
    r.offset_true = it->second[2];
    r.skew_true = it->second[3];
    log.records.push_back(r);
  }
  if (!ranges_text.empty()) {
    detail::CsvTable rg = detail::parse_csv(ranges_text);
    const int rf = rg.column("frame"), rt = rg.column("t"), ro = rg.column("observer"),
              ra = rg.column("a"), rb = rg.column("b"), re = rg.column("range_est"),
              rr = rg.column("range_true"), rq = rg.column("quality"),
              rc = rg.column("clamped");
    for (const auto& row : rg.rows) {
      RangeRecord r;
      r.frame = std::stol(row.at(static_cast<size_t>(rf)));
      r.t = csv_num(row, rt);
      r.observer = static_cast<int>(std::stol(row.at(static_cast<size_t>(ro))));
      r.a = static_cast<int>(std::stol(row.at(static_cast<size_t>(ra))));
      r.b = static_cast<int>(std::stol(row.at(static_cast<size_t>(rb))));
      r.range_est = csv_num(row, re);
      r.range_true = csv_num(row, rr);
      r.quality = csv_num(row, rq);
      r.clamped = row.at(static_cast<size_t>(rc)) == "1";
      log.ranges.push_back(r);
    }
  }
  return log;
}

}  // namespace relsync
