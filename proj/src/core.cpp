#include "icn/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

namespace icn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

bool is_comment_or_blank(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_int64(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

void write_comment(std::ostream& out, std::span<const std::string> comment) {
  for (const auto& c : comment) out << "# " << c << '\n';
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Group g) noexcept {
  switch (g) {
    case Group::MD: return "MD";
    case Group::AD: return "AD";
    case Group::ED: return "ED";
    case Group::ND: return "ND";
  }
  return "??";
}

Group parse_group(std::string_view tag) {
  for (Group g : kAllGroups)
    if (to_string(g) == tag) return g;
  throw SchemaError("unknown group tag '" + std::string(tag) + "'");
}

Group group_from_timestamp(std::int64_t ts) noexcept {
  std::int64_t secs = ts % 86400;
  if (secs < 0) secs += 86400;
  switch (secs / 21600) {
    case 0: return Group::ND;
    case 1: return Group::MD;
    case 2: return Group::AD;
    default: return Group::ED;
  }
}

std::size_t group_index(Group g) noexcept { return static_cast<std::size_t>(g); }

Label label_from_int(int v) {
  if (v == 1) return Label::Normal;
  if (v == -1) return Label::Anomalous;
  throw ArgumentError("label must be +1 or -1, got " + std::to_string(v));
}

void ParameterSpec::validate() const {
  if (!(psi > 0.0)) throw ArgumentError("parameter '" + name + "': operational limit must be > 0");
  if (mu >= 0.0 && mu <= psi) {
    constexpr double eps = 1e-9;
    if (p_th < mu - eps * psi || p_th > psi + eps * psi)
      throw ArgumentError("parameter '" + name + "': threshold outside [mu, psi]");
  }
}

SensitivityDegree SensitivityDegree::from_pct(int pct) {
  if (pct != 20 && pct != 60 && pct != 100)
    throw ArgumentError("sensitivity must be 20, 60 or 100, got " + std::to_string(pct));
  return SensitivityDegree(pct);
}

std::size_t SensitivityDegree::required_count(std::size_t total) const {
  if (total == 0) throw ArgumentError("required_count needs at least one parameter");
  switch (pct_) {
    case 20: return total;
    case 60: return std::min<std::size_t>(3, total);
    default: return 1;
  }
}

// ---------------------------------------------------------------------------
// DataTrace

DataTrace::DataTrace(std::vector<std::string> schema, std::vector<DataRow> rows)
    : schema_(std::move(schema)), rows_() {
  if (schema_.empty()) throw SchemaError("data trace schema must not be empty");
  std::set<std::string_view> seen;
  for (const auto& n : schema_)
    if (!seen.insert(n).second) throw SchemaError("duplicate parameter '" + n + "' in schema");
  rows_.reserve(rows.size());
  for (auto& r : rows) push_back(std::move(r));
}

std::size_t DataTrace::index_of(std::string_view name) const {
  auto it = std::find(schema_.begin(), schema_.end(), name);
  if (it == schema_.end()) throw SchemaError("missing parameter '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - schema_.begin());
}

bool DataTrace::has(std::string_view name) const noexcept {
  return std::find(schema_.begin(), schema_.end(), name) != schema_.end();
}

double DataTrace::value(std::size_t row, std::string_view name) const {
  return rows_.at(row).values[index_of(name)];
}

std::vector<double> DataTrace::column(std::string_view name) const {
  const std::size_t j = index_of(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.values[j]);
  return out;
}

bool DataTrace::labeled() const noexcept {
  return !rows_.empty() && std::all_of(rows_.begin(), rows_.end(), [](const DataRow& r) { return r.label.has_value(); });
}

void DataTrace::push_back(DataRow row) {
  if (row.values.size() != schema_.size())
    throw SchemaError("row has " + std::to_string(row.values.size()) + " values, schema has " +
                      std::to_string(schema_.size()));
  for (double v : row.values)
    if (!std::isfinite(v)) throw ArgumentError("non-finite value in data row");
  rows_.push_back(std::move(row));
}

DataTrace DataTrace::subset(std::span<const std::size_t> indices) const {
  DataTrace out(schema_);
  out.rows_.reserve(indices.size());
  for (auto i : indices) out.rows_.push_back(rows_.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// CSV

DataTrace read_data_trace(std::istream& in, const std::vector<std::string>* schema) {
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!is_comment_or_blank(line)) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw SchemaError("data trace has no header row");

  const std::string header_line = line;
  auto header = split_csv(header_line);
  if (header.size() < 3 || header[0] != "ts" || header[1] != "group")
    throw SchemaError("header must start with 'ts,group' followed by parameter columns");
  const bool has_label = header.back() == "label";
  const std::size_t param_end = has_label ? header.size() - 1 : header.size();

  std::vector<std::string> names;
  if (schema != nullptr) {
    names = *schema;
  } else {
    for (std::size_t c = 2; c < param_end; ++c) names.emplace_back(header[c]);
  }
  std::vector<std::size_t> col_of;
  for (const auto& n : names) {
    auto it = std::find(header.begin() + 2, header.begin() + static_cast<std::ptrdiff_t>(param_end), n);
    if (it == header.begin() + static_cast<std::ptrdiff_t>(param_end))
      throw SchemaError("missing column '" + n + "'");
    col_of.push_back(static_cast<std::size_t>(it - header.begin()));
  }

  DataTrace trace(names);
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    ++row_no;
    auto cells = split_csv(line);
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()),
                       row_no);
    DataRow row;
    auto ts = to_int64(cells[0]);
    if (!ts) throw ParseError("invalid timestamp '" + std::string(cells[0]) + "'", row_no);
    row.timestamp = *ts;
    row.group = cells[1].empty() ? group_from_timestamp(row.timestamp) : parse_group(cells[1]);
    row.values.reserve(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      auto v = to_double(cells[col_of[j]]);
      if (!v)
        throw ParseError("non-numeric value '" + std::string(cells[col_of[j]]) + "' in column '" + names[j] + "'",
                         row_no);
      row.values.push_back(*v);
    }
    if (has_label && !cells.back().empty()) {
      auto l = to_int64(cells.back());
      if (!l || (*l != 1 && *l != -1))
        throw ParseError("label must be +1 or -1, got '" + std::string(cells.back()) + "'", row_no);
      row.label = label_from_int(static_cast<int>(*l));
    }
    trace.push_back(std::move(row));
  }
  return trace;
}

DataTrace parse_data_trace(const std::string& path, const std::vector<std::string>& schema) {
  auto in = open_in(path);
  return read_data_trace(in, &schema);
}

DataTrace parse_data_trace(const std::string& path) {
  auto in = open_in(path);
  return read_data_trace(in, nullptr);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

void write_data_trace(std::ostream& out, const DataTrace& trace, std::span<const std::string> comment) {
  write_comment(out, comment);
  const bool labeled = std::any_of(trace.rows().begin(), trace.rows().end(),
                                   [](const DataRow& r) { return r.label.has_value(); });
  out << "ts,group";
  for (const auto& n : trace.schema()) out << ',' << n;
  if (labeled) out << ",label";
  out << '\n';
  for (const auto& r : trace.rows()) {
    out << r.timestamp << ',' << to_string(r.group);
    for (double v : r.values) out << ',' << format_double(v);
    if (labeled) {
      out << ',';
      if (r.label) out << (*r.label == Label::Normal ? "+1" : "-1");
    }
    out << '\n';
  }
}

void write_data_trace(const std::string& path, const DataTrace& trace, std::span<const std::string> comment) {
  auto out = open_out(path);
  write_data_trace(out, trace, comment);
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::map<Group, DataTrace> split_by_group(const DataTrace& trace) {
  std::map<Group, DataTrace> out;
  for (Group g : kAllGroups) out.emplace(g, DataTrace(trace.schema()));
  for (const auto& r : trace.rows()) out.at(r.group).push_back(r);
  return out;
}

Split train_test_split(const DataTrace& trace, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("split fraction must lie in (0, 1)");
  if (trace.empty()) throw ArgumentError("cannot split an empty trace");
  const std::size_t n = trace.size();
  const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  return {trace.subset(train_idx), trace.subset(test_idx)};
}

// ---------------------------------------------------------------------------
// EventTrace

EventTrace::EventTrace(std::vector<Symbol> events) : events_(std::move(events)) {
  alphabet_ = events_;
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
}

EventTrace::EventTrace(std::vector<Symbol> events, std::vector<Symbol> alphabet)
    : events_(std::move(events)), alphabet_(std::move(alphabet)) {
  if (alphabet_.empty()) throw ArgumentError("event alphabet must not be empty");
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
  for (const auto& e : events_)
    if (!std::binary_search(alphabet_.begin(), alphabet_.end(), e))
      throw ArgumentError("event '" + e + "' is not in the alphabet");
}

EventTrace EventTrace::from_chars(std::string_view letters) {
  std::vector<Symbol> ev;
  ev.reserve(letters.size());
  for (char c : letters) ev.emplace_back(1, c);
  return EventTrace(std::move(ev));
}

std::size_t EventTrace::count(std::string_view e) const noexcept {
  return static_cast<std::size_t>(std::count(events_.begin(), events_.end(), e));
}

bool EventTrace::contains(std::string_view e) const noexcept {
  return std::binary_search(alphabet_.begin(), alphabet_.end(), e) &&
         std::find(events_.begin(), events_.end(), e) != events_.end();
}

EventTrace RowEvents::flatten() const {
  std::vector<Symbol> all;
  for (const auto& s : slices) all.insert(all.end(), s.events().begin(), s.events().end());
  return EventTrace(std::move(all));
}

RowEvents RowEvents::subset(std::span<const std::size_t> indices) const {
  RowEvents out;
  for (auto i : indices) {
    out.timestamps.push_back(timestamps.at(i));
    out.slices.push_back(slices.at(i));
  }
  return out;
}

EventTrace read_event_trace(std::istream& in) {
  std::vector<Symbol> ev;
  std::string line;
  while (std::getline(in, line)) {
    if (is_comment_or_blank(line)) continue;
    ev.emplace_back(trim(line));
  }
  return EventTrace(std::move(ev));
}

EventTrace parse_event_trace(const std::string& path) {
  auto in = open_in(path);
  return read_event_trace(in);
}

void write_event_trace(std::ostream& out, const EventTrace& trace, std::span<const std::string> comment) {
  write_comment(out, comment);
  for (const auto& e : trace.events()) out << e << '\n';
}

RowEvents read_row_events(std::istream& in) {
  RowEvents out;
  std::vector<Symbol> current;
  bool open = false;
  std::string line;
  std::size_t line_no = 0;
  auto close = [&] {
    if (open) out.slices.emplace_back(std::move(current));
    current.clear();
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      t.remove_prefix(1);
      t = trim(t);
      if (t.starts_with("row ")) {
        auto ts = to_int64(trim(t.substr(4)));
        if (!ts) throw ParseError("invalid row marker", line_no);
        close();
        out.timestamps.push_back(*ts);
        open = true;
      }
      continue;
    }
    if (!open) throw ParseError("event before the first row marker", line_no);
    current.emplace_back(t);
  }
  close();
  return out;
}

RowEvents parse_row_events(const std::string& path) {
  auto in = open_in(path);
  return read_row_events(in);
}

void write_row_events(std::ostream& out, const RowEvents& events, std::span<const std::string> comment) {
  write_comment(out, comment);
  for (std::size_t i = 0; i < events.size(); ++i) {
    out << "# row " << events.timestamps[i] << '\n';
    for (const auto& e : events.slices[i].events()) out << e << '\n';
  }
}

void write_row_events(const std::string& path, const RowEvents& events, std::span<const std::string> comment) {
  auto out = open_out(path);
  write_row_events(out, events, comment);
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace icn
