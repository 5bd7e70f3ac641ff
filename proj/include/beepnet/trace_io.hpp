#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "beepnet/engine.hpp"
#include "beepnet/graph.hpp"
#include "beepnet/verify.hpp"

namespace beepnet {

// Run-length encoding for 0/1 vectors: comma-separated run lengths,
// alternating values and always starting with the length of the leading
// zero run (possibly 0).  "5" is five zeros, "0,1,4" is 1 followed by
// four zeros.
inline std::string rle_encode_bits(std::span<const uint8_t> bits) {
  if (bits.empty()) return "0";
  std::vector<size_t> runs;
  uint8_t cur = 0;
  size_t run = 0;
  for (uint8_t raw : bits) {
    const uint8_t b = raw ? 1 : 0;
    if (b != cur) {
      runs.push_back(run);
      cur ^= 1;
      run = 0;
    }
    ++run;
  }
  runs.push_back(run);
  std::ostringstream os;
  for (size_t i = 0; i < runs.size(); ++i) {
    if (i) os << ',';
    os << runs[i];
  }
  return os.str();
}

inline std::vector<uint8_t> rle_decode_bits(const std::string& text,
                                            size_t n) {
  std::vector<uint8_t> bits;
  bits.reserve(n);
  uint8_t cur = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    size_t consumed = 0;
    const std::string token = text.substr(pos, comma - pos);
    unsigned long long run = 0;
    try {
      run = std::stoull(token, &consumed);
    } catch (const std::exception&) {
      throw std::runtime_error("rle: bad run length '" + token + "'");
    }
    if (consumed != token.size())
      throw std::runtime_error("rle: bad run length '" + token + "'");
    bits.insert(bits.end(), run, cur);
    cur ^= 1;
    pos = comma + 1;
  }
  if (bits.size() != n) throw std::runtime_error("rle: length mismatch");
  return bits;
}

struct TraceFile {
  Graph graph;
  FeedbackMode feedback = FeedbackMode::Plain;
  std::vector<RoundTrace> rounds;
};

// Text format:
//   # beepnet trace 1
//   # feedback plain|sender_cd
//   <edge list as written by Graph::to_edge_list>
//   t <round> a <actions rle> h <heard rle> s <status diff>
// The status diff lists "node:letter" pairs changed since the previous
// round ("-" when nothing changed); the implicit round -1 baseline is all
// sleeping.
inline void write_trace(std::ostream& out, const Graph& g, FeedbackMode mode,
                        const std::vector<RoundTrace>& rounds) {
  out << "# beepnet trace 1\n";
  out << "# feedback "
      << (mode == FeedbackMode::SenderCd ? "sender_cd" : "plain") << '\n';
  out << g.to_edge_list();
  const NodeId n = g.node_count();
  std::vector<Status> prev(n, Status::Sleeping);
  std::vector<uint8_t> action_bits(n), heard_bits(n);
  for (const RoundTrace& tr : rounds) {
    if (tr.actions.size() != n || tr.heard.size() != n ||
        tr.statuses.size() != n)
      throw std::invalid_argument("trace round size mismatch");
    for (NodeId v = 0; v < n; ++v) {
      action_bits[v] = tr.actions[v] == Action::Beep ? 1 : 0;
      heard_bits[v] = tr.heard[v] ? 1 : 0;
    }
    out << "t " << tr.t << " a " << rle_encode_bits(action_bits) << " h "
        << rle_encode_bits(heard_bits) << " s ";
    bool any = false;
    for (NodeId v = 0; v < n; ++v) {
      if (tr.statuses[v] == prev[v]) continue;
      if (any) out << ',';
      out << v << ':' << status_char(tr.statuses[v]);
      any = true;
      prev[v] = tr.statuses[v];
    }
    if (!any) out << '-';
    out << '\n';
  }
}

inline std::string trace_to_string(const Graph& g, FeedbackMode mode,
                                   const std::vector<RoundTrace>& rounds) {
  std::ostringstream os;
  write_trace(os, g, mode, rounds);
  return os.str();
}

inline TraceFile parse_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# beepnet trace 1")
    throw std::runtime_error("trace: missing magic line");
  if (!std::getline(in, line) || line.rfind("# feedback ", 0) != 0)
    throw std::runtime_error("trace: missing feedback line");
  TraceFile tf;
  const std::string mode = line.substr(11);
  if (mode == "plain")
    tf.feedback = FeedbackMode::Plain;
  else if (mode == "sender_cd")
    tf.feedback = FeedbackMode::SenderCd;
  else
    throw std::runtime_error("trace: unknown feedback mode '" + mode + "'");

  std::string graph_text;
  std::vector<std::string> round_lines;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("t ", 0) == 0) {
      round_lines.push_back(line);
    } else {
      if (!round_lines.empty())
        throw std::runtime_error("trace: graph line after round lines");
      graph_text += line;
      graph_text += '\n';
    }
  }
  tf.graph = Graph::parse_edge_list(graph_text);
  const NodeId n = tf.graph.node_count();

  std::vector<Status> cur(n, Status::Sleeping);
  for (const std::string& rl : round_lines) {
    std::istringstream ls(rl);
    std::string kt, ka, kh, ks, va, vh, vs;
    uint64_t t = 0;
    if (!(ls >> kt >> t >> ka >> va >> kh >> vh >> ks >> vs) || kt != "t" ||
        ka != "a" || kh != "h" || ks != "s")
      throw std::runtime_error("trace: malformed round line '" + rl + "'");
    std::string extra;
    if (ls >> extra)
      throw std::runtime_error("trace: trailing tokens in '" + rl + "'");
    if (!tf.rounds.empty() && t != tf.rounds.back().t + 1)
      throw std::runtime_error("trace: non-consecutive round numbers");
    RoundTrace tr;
    tr.t = t;
    tr.heard = rle_decode_bits(vh, n);
    tr.actions.assign(n, Action::Listen);
    const auto action_bits = rle_decode_bits(va, n);
    for (NodeId v = 0; v < n; ++v)
      if (action_bits[v]) tr.actions[v] = Action::Beep;
    if (vs != "-") {
      size_t pos = 0;
      while (pos <= vs.size()) {
        size_t comma = vs.find(',', pos);
        if (comma == std::string::npos) comma = vs.size();
        const std::string item = vs.substr(pos, comma - pos);
        const size_t colon = item.find(':');
        if (colon == std::string::npos || colon + 2 != item.size())
          throw std::runtime_error("trace: bad status diff '" + item + "'");
        size_t consumed = 0;
        unsigned long long v = 0;
        try {
          v = std::stoull(item.substr(0, colon), &consumed);
        } catch (const std::exception&) {
          throw std::runtime_error("trace: bad status diff '" + item + "'");
        }
        if (consumed != colon || v >= n)
          throw std::runtime_error("trace: bad status diff '" + item + "'");
        cur[v] = status_from_char(item[colon + 1]);
        pos = comma + 1;
      }
    }
    tr.statuses = cur;
    tf.rounds.push_back(std::move(tr));
  }
  return tf;
}

inline TraceFile parse_trace(const std::string& text) {
  std::istringstream is(text);
  return parse_trace(is);
}

// Re-derives what every node should have heard from the recorded actions
// and counts disagreements with the recorded feedback.  Sleeping nodes
// must listen and hear nothing.
inline uint64_t count_feedback_violations(
    const Graph& g, FeedbackMode mode,
    const std::vector<RoundTrace>& rounds) {
  const NodeId n = g.node_count();
  uint64_t violations = 0;
  std::vector<uint8_t> neighbor_beeped(n);
  for (const RoundTrace& tr : rounds) {
    if (tr.actions.size() != n || tr.heard.size() != n ||
        tr.statuses.size() != n)
      throw std::invalid_argument("trace round size mismatch");
    std::fill(neighbor_beeped.begin(), neighbor_beeped.end(), 0);
    for (NodeId u = 0; u < n; ++u)
      if (tr.actions[u] == Action::Beep)
        for (NodeId w : g.neighbors(u)) neighbor_beeped[w] = 1;
    for (NodeId v = 0; v < n; ++v) {
      if (tr.statuses[v] == Status::Sleeping) {
        if (tr.actions[v] != Action::Listen || tr.heard[v]) ++violations;
        continue;
      }
      bool expect;
      if (tr.actions[v] == Action::Listen)
        expect = neighbor_beeped[v] != 0;
      else
        expect = mode == FeedbackMode::SenderCd && neighbor_beeped[v] != 0;
      if ((tr.heard[v] != 0) != expect) ++violations;
    }
  }
  return violations;
}

struct TraceCheckReport {
  uint64_t rounds = 0;
  uint64_t feedback_violations = 0;
  bool mis_valid = false;
  bool stable = false;
  uint32_t mis_size = 0;
};

inline TraceCheckReport recheck_trace(const TraceFile& tf) {
  TraceCheckReport rep;
  rep.rounds = tf.rounds.size();
  rep.feedback_violations =
      count_feedback_violations(tf.graph, tf.feedback, tf.rounds);
  if (!tf.rounds.empty()) {
    const auto& final_statuses = tf.rounds.back().statuses;
    const auto mis = mis_nodes(final_statuses);
    rep.mis_size = static_cast<uint32_t>(mis.size());
    rep.mis_valid = is_mis(tf.graph, mis);
    rep.stable = is_stable_configuration(tf.graph, final_statuses);
  }
  return rep;
}

}  // namespace beepnet
