#include "dsched/core/fjs_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dsched {

namespace {

// Whitespace token cursor over one line, tracking the line number for errors.
class LineTokens {
 public:
  LineTokens(const std::string& line, int line_no) : line_no_(line_no) {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) tokens_.push_back(tok);
  }

  bool empty() const { return pos_ >= tokens_.size(); }
  std::size_t remaining() const { return tokens_.size() - pos_; }
  int line_no() const { return line_no_; }

  std::string next_raw(const char* what) {
    if (empty()) throw ParseError(std::string("missing ") + what, line_no_);
    return tokens_[pos_++];
  }

  long next_int(const char* what) {
    std::string tok = next_raw(what);
    try {
      std::size_t used = 0;
      long v = std::stol(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("expected integer for ") + what + ", got '" + tok + "'",
                       line_no_);
    }
  }

  double next_double(const char* what) {
    std::string tok = next_raw(what);
    try {
      std::size_t used = 0;
      double v = std::stod(tok, &used);
      if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("expected number for ") + what + ", got '" + tok + "'",
                       line_no_);
    }
  }

  void expect_done() {
    if (!empty())
      throw ParseError("trailing tokens starting at '" + tokens_[pos_] + "'", line_no_);
  }

 private:
  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  int line_no_;
};

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current)) lines.push_back(current);
  return lines;
}

bool is_blank_or_comment(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Reads one operation: `n_alts` then n_alts `machine time` pairs (1-based machines).
Operation parse_operation(LineTokens& toks, int job_id, int op_index, int machine_count) {
  Operation op;
  op.job_id = job_id;
  op.op_index = op_index;
  long n_alts = toks.next_int("alternative count");
  if (n_alts < 1) throw ParseError("operation with zero alternatives", toks.line_no());
  for (long a = 0; a < n_alts; ++a) {
    long machine = toks.next_int("machine id");
    double time = toks.next_double("processing time");
    if (machine < 1 || machine > machine_count)
      throw ParseError("machine index " + std::to_string(machine) + " out of range [1," +
                           std::to_string(machine_count) + "]",
                       toks.line_no());
    if (!(time > 0.0))
      throw ParseError("non-positive processing time " + std::to_string(time), toks.line_no());
    op.alternatives.emplace_back(static_cast<int>(machine) - 1, time);
  }
  std::sort(op.alternatives.begin(), op.alternatives.end());
  for (std::size_t a = 1; a < op.alternatives.size(); ++a)
    if (op.alternatives[a].first == op.alternatives[a - 1].first)
      throw ParseError("machine listed twice for one operation", toks.line_no());
  return op;
}

Job parse_job_body(LineTokens& toks, int job_id, int machine_count) {
  Job job;
  job.id = job_id;
  long n_ops = toks.next_int("operation count");
  if (n_ops < 1) throw ParseError("job with zero operations", toks.line_no());
  for (long j = 0; j < n_ops; ++j)
    job.operations.push_back(parse_operation(toks, job_id, static_cast<int>(j), machine_count));
  return job;
}

}  // namespace

Instance parse_fjs(const std::string& text, const std::string& name) {
  std::vector<std::string> lines = split_lines(text);
  std::size_t cursor = 0;
  auto next_content_line = [&]() -> int {
    while (cursor < lines.size() && is_blank_or_comment(lines[cursor])) ++cursor;
    return cursor < lines.size() ? static_cast<int>(cursor) : -1;
  };

  int header_idx = next_content_line();
  if (header_idx < 0) throw ParseError("empty file, expected header", 1);
  LineTokens header(lines[header_idx], header_idx + 1);
  ++cursor;
  long n_jobs = header.next_int("job count");
  long n_machines = header.next_int("machine count");
  if (n_jobs < 1 || n_machines < 1)
    throw ParseError("malformed header: need at least one job and one machine", header_idx + 1);
  if (!header.empty()) header.next_raw("average flexibility");  // ignored
  header.expect_done();

  Instance instance;
  instance.name = name;
  instance.machine_count = static_cast<int>(n_machines);
  for (long i = 0; i < n_jobs; ++i) {
    int job_idx = next_content_line();
    if (job_idx < 0)
      throw ParseError("expected " + std::to_string(n_jobs) + " job lines, found " +
                           std::to_string(i),
                       static_cast<int>(lines.size()));
    LineTokens toks(lines[job_idx], job_idx + 1);
    ++cursor;
    instance.jobs.push_back(parse_job_body(toks, static_cast<int>(i), instance.machine_count));
    toks.expect_done();
  }
  if (next_content_line() >= 0)
    throw ParseError("unexpected content after last job line", static_cast<int>(cursor) + 1);

  instance.validate();
  return instance;
}

Instance load_fjs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open instance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos)
    name = name.substr(slash + 1);
  return parse_fjs(buffer.str(), name);
}

std::string write_fjs(const Instance& instance) {
  std::ostringstream out;
  double total_alts = 0;
  for (const auto& job : instance.jobs)
    for (const auto& op : job.operations) total_alts += static_cast<double>(op.alternatives.size());
  int ops = instance.total_operations();
  out << instance.jobs.size() << ' ' << instance.machine_count << ' '
      << (ops > 0 ? total_alts / ops : 0.0) << '\n';
  for (const auto& job : instance.jobs) {
    out << job.operations.size();
    for (const auto& op : job.operations) {
      out << ' ' << op.alternatives.size();
      for (const auto& [m, t] : op.alternatives) out << ' ' << m + 1 << ' ' << t;
    }
    out << '\n';
  }
  return out.str();
}

void DisturbanceScript::validate(int machine_count) const {
  Time prev = -std::numeric_limits<Time>::infinity();
  for (const auto& ev : events) {
    if (!(ev.time >= prev))
      throw DomainError("disturbance times must be non-decreasing");
    prev = ev.time;
    switch (ev.kind) {
      case Disturbance::Kind::job_arrival:
        if (ev.job.operations.empty()) throw DomainError("arriving job has no operations");
        break;
      case Disturbance::Kind::machine_failure:
        if (!(ev.duration > 0.0)) throw DomainError("machine failure needs positive duration");
        [[fallthrough]];
      case Disturbance::Kind::machine_recovery:
        if (ev.machine < 0 || ev.machine >= machine_count)
          throw DomainError("disturbance references machine out of range");
        break;
    }
  }
}

DisturbanceScript parse_disturbances(const std::string& text, int machine_count) {
  DisturbanceScript script;
  std::vector<std::string> lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank_or_comment(lines[i])) continue;
    LineTokens toks(lines[i], static_cast<int>(i) + 1);
    std::string kind = toks.next_raw("record kind");
    Disturbance ev;
    ev.time = toks.next_double("event time");
    if (ev.time < 0.0) throw ParseError("negative event time", toks.line_no());
    if (kind == "arrival") {
      ev.kind = Disturbance::Kind::job_arrival;
      ev.job = parse_job_body(toks, 0, machine_count);  // job id rebased on arrival
      ev.job.arrival_time = ev.time;
    } else if (kind == "fail") {
      ev.kind = Disturbance::Kind::machine_failure;
      ev.machine = static_cast<int>(toks.next_int("machine id")) - 1;
      ev.duration = toks.next_double("failure duration");
    } else if (kind == "recover") {
      ev.kind = Disturbance::Kind::machine_recovery;
      ev.machine = static_cast<int>(toks.next_int("machine id")) - 1;
    } else {
      throw ParseError("unknown record kind '" + kind + "'", toks.line_no());
    }
    toks.expect_done();
    script.events.push_back(std::move(ev));
  }
  script.validate(machine_count);
  return script;
}

DisturbanceScript load_disturbance_file(const std::string& path, int machine_count) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open disturbance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_disturbances(buffer.str(), machine_count);
}

std::string write_disturbances(const DisturbanceScript& script) {
  std::ostringstream out;
  for (const auto& ev : script.events) {
    switch (ev.kind) {
      case Disturbance::Kind::job_arrival: {
        out << "arrival " << ev.time << ' ' << ev.job.operations.size();
        for (const auto& op : ev.job.operations) {
          out << ' ' << op.alternatives.size();
          for (const auto& [m, t] : op.alternatives) out << ' ' << m + 1 << ' ' << t;
        }
        out << '\n';
        break;
      }
      case Disturbance::Kind::machine_failure:
        out << "fail " << ev.time << ' ' << ev.machine + 1 << ' ' << ev.duration << '\n';
        break;
      case Disturbance::Kind::machine_recovery:
        out << "recover " << ev.time << ' ' << ev.machine + 1 << '\n';
        break;
    }
  }
  return out.str();
}

}  // namespace dsched
