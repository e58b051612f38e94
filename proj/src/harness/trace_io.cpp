#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fixpoint/errors.hpp"
#include "fixpoint/harness.hpp"

namespace fixpoint {

namespace {

// shortest decimal form that round-trips; locale-independent
void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double parse_double(std::string_view cell, const char* what) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
    throw config_error(std::string("trace parse: bad ") + what + " value '" + std::string(cell) +
                       "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
  if (trace.records.empty()) throw argument_error("cannot serialize an empty trace");
  const std::size_t arity = trace.records[0].residuals.size();
  const std::size_t d = trace.records[0].v.dim();
  bool has_dist = false, has_step2 = false;
  for (const auto& rec : trace.records) {
    has_dist = has_dist || rec.dist_to_target.has_value();
    has_step2 = has_step2 || rec.step2_defect.has_value();
  }

  std::string out = "n,step_norm,w_gap,residual_max";
  for (std::size_t i = 0; i < arity; ++i) out += ",residual_i" + std::to_string(i);
  if (has_dist) out += ",dist_to_target";
  if (has_step2) out += ",step2_defect";
  for (std::size_t i = 0; i < d; ++i) out += ",v" + std::to_string(i);
  out += '\n';

  for (const auto& rec : trace.records) {
    if (rec.residuals.size() != arity || rec.v.dim() != d)
      throw argument_error("trace records disagree on arity/dimension");
    out += std::to_string(rec.n);
    out += ',';
    append_double(out, rec.step_norm);
    out += ',';
    append_double(out, rec.w_gap);
    double rmax = 0.0;
    for (double r : rec.residuals) rmax = std::max(rmax, r);
    out += ',';
    append_double(out, rmax);
    for (double r : rec.residuals) {
      out += ',';
      append_double(out, r);
    }
    if (has_dist) {
      out += ',';
      if (rec.dist_to_target) append_double(out, *rec.dist_to_target);
    }
    if (has_step2) {
      out += ',';
      if (rec.step2_defect) append_double(out, *rec.step2_defect);
    }
    for (std::size_t i = 0; i < d; ++i) {
      out += ',';
      append_double(out, rec.v[i]);
    }
    out += '\n';
  }
  return out;
}

Trace trace_from_csv(const std::string& text) {
  std::vector<std::string_view> lines;
  for (std::string_view rest = text; !rest.empty();) {
    const std::size_t pos = rest.find('\n');
    std::string_view line = pos == std::string_view::npos ? rest : rest.substr(0, pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  if (lines.empty()) throw config_error("trace parse: no header row");

  const std::vector<std::string_view> head = split(lines[0], ',');
  std::size_t col = 0;
  const auto expect = [&](std::string_view name) {
    if (col >= head.size() || head[col] != name)
      throw config_error("trace parse: expected column '" + std::string(name) + "'");
    ++col;
  };
  expect("n");
  expect("step_norm");
  expect("w_gap");
  expect("residual_max");
  std::size_t arity = 0;
  while (col < head.size() && head[col] == "residual_i" + std::to_string(arity)) {
    ++arity;
    ++col;
  }
  if (arity == 0) throw config_error("trace parse: missing residual columns");
  bool has_dist = false, has_step2 = false;
  if (col < head.size() && head[col] == "dist_to_target") {
    has_dist = true;
    ++col;
  }
  if (col < head.size() && head[col] == "step2_defect") {
    has_step2 = true;
    ++col;
  }
  std::size_t d = 0;
  while (col < head.size() && head[col] == "v" + std::to_string(d)) {
    ++d;
    ++col;
  }
  if (d == 0 || col != head.size()) throw config_error("trace parse: malformed header");

  Trace trace;
  trace.meta.space = SpaceSpec::euclidean(d);
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::vector<std::string_view> cells = split(lines[li], ',');
    const std::size_t expected =
        4 + arity + (has_dist ? 1 : 0) + (has_step2 ? 1 : 0) + d;
    if (cells.size() != expected)
      throw config_error("trace parse: row " + std::to_string(li) + " has " +
                         std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(expected));
    TraceRecord rec;
    std::size_t c = 0;
    rec.n = static_cast<std::size_t>(parse_double(cells[c++], "n"));
    rec.step_norm = parse_double(cells[c++], "step_norm");
    rec.w_gap = parse_double(cells[c++], "w_gap");
    ++c;  // residual_max is derived; skip on read
    rec.residuals.resize(arity);
    for (std::size_t i = 0; i < arity; ++i) rec.residuals[i] = parse_double(cells[c++], "residual");
    if (has_dist) {
      if (!cells[c].empty()) rec.dist_to_target = parse_double(cells[c], "dist_to_target");
      ++c;
    }
    if (has_step2) {
      if (!cells[c].empty()) rec.step2_defect = parse_double(cells[c], "step2_defect");
      ++c;
    }
    std::vector<double> coords(d);
    for (std::size_t i = 0; i < d; ++i) coords[i] = parse_double(cells[c++], "coordinate");
    rec.v = Point(std::move(coords));
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot open '" + tmp.string() + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw config_error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path) {
  write_text_atomic(path, trace_to_csv(trace));
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace fixpoint
