#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "icn/errors.hpp"

namespace icn {

// ---------------------------------------------------------------------------
// Groups and labels
// ---------------------------------------------------------------------------

/// Time-of-day partition of the plant data by power-demand pattern.
enum class Group { MD, AD, ED, ND };

inline constexpr std::array<Group, 4> kAllGroups{Group::MD, Group::AD, Group::ED, Group::ND};

[[nodiscard]] std::string_view to_string(Group g) noexcept;
/// Throws SchemaError naming the tag when it is not one of MD/AD/ED/ND.
[[nodiscard]] Group parse_group(std::string_view tag);
/// 06-12 MD, 12-18 AD, 18-24 ED, 00-06 ND (UTC hour of the timestamp).
[[nodiscard]] Group group_from_timestamp(std::int64_t ts) noexcept;
[[nodiscard]] std::size_t group_index(Group g) noexcept;

enum class Label : int { Normal = 1, Anomalous = -1 };

[[nodiscard]] constexpr int to_int(Label l) noexcept { return static_cast<int>(l); }
[[nodiscard]] Label label_from_int(int v);

// ---------------------------------------------------------------------------
// Parameters and sensitivity
// ---------------------------------------------------------------------------

/// One physical parameter: operational limit psi, learned trim mean mu and
/// the alarm threshold p_th, all in engineering units.
struct ParameterSpec {
  std::string name;
  double psi = 1.0;
  double mu = 0.0;
  double p_th = 0.0;

  /// Checks psi > 0 and, when 0 <= mu <= psi, mu <= p_th <= psi.
  void validate() const;
};

/// How many compromised parameters make a row (or events make a trace) an
/// attack: all of them at 20%, any three at 60%, any one at 100%.
class SensitivityDegree {
 public:
  static SensitivityDegree from_pct(int pct);
  static SensitivityDegree least() { return SensitivityDegree(20); }
  static SensitivityDegree medium() { return SensitivityDegree(60); }
  static SensitivityDegree high() { return SensitivityDegree(100); }

  [[nodiscard]] int pct() const noexcept { return pct_; }
  /// Result lies in [1, total] for total >= 1.
  [[nodiscard]] std::size_t required_count(std::size_t total) const;

  friend bool operator==(SensitivityDegree, SensitivityDegree) = default;

 private:
  explicit SensitivityDegree(int pct) : pct_(pct) {}
  int pct_;
};

inline constexpr std::array<int, 3> kSensitivityLevels{20, 60, 100};

// ---------------------------------------------------------------------------
// Data traces
// ---------------------------------------------------------------------------

struct DataRow {
  std::int64_t timestamp = 0;
  Group group = Group::MD;
  std::vector<double> values;  ///< schema order
  std::optional<Label> label;
};

/// Timestamped parameter readings sharing one schema.
class DataTrace {
 public:
  explicit DataTrace(std::vector<std::string> schema, std::vector<DataRow> rows = {});

  [[nodiscard]] const std::vector<std::string>& schema() const noexcept { return schema_; }
  [[nodiscard]] const std::vector<DataRow>& rows() const noexcept { return rows_; }
  [[nodiscard]] std::vector<DataRow>& mutable_rows() noexcept { return rows_; }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
  [[nodiscard]] bool empty() const noexcept { return rows_.empty(); }
  [[nodiscard]] const DataRow& operator[](std::size_t i) const { return rows_.at(i); }

  /// Column position of `name`; throws SchemaError naming it when absent.
  [[nodiscard]] std::size_t index_of(std::string_view name) const;
  [[nodiscard]] bool has(std::string_view name) const noexcept;
  [[nodiscard]] double value(std::size_t row, std::string_view name) const;
  /// Whole column in row order.
  [[nodiscard]] std::vector<double> column(std::string_view name) const;
  [[nodiscard]] bool labeled() const noexcept;

  void push_back(DataRow row);
  [[nodiscard]] DataTrace subset(std::span<const std::size_t> indices) const;

 private:
  std::vector<std::string> schema_;
  std::vector<DataRow> rows_;
};

/// Reads the CSV data-trace format. Every name in `schema` must appear in the
/// header; the returned trace uses `schema` order.
[[nodiscard]] DataTrace parse_data_trace(const std::string& path, const std::vector<std::string>& schema);
/// Same, taking the schema from the header (all columns between `group` and `label`).
[[nodiscard]] DataTrace parse_data_trace(const std::string& path);
[[nodiscard]] DataTrace read_data_trace(std::istream& in, const std::vector<std::string>* schema = nullptr);

/// `comment` lines are written first, each prefixed with "# ".
void write_data_trace(std::ostream& out, const DataTrace& trace, std::span<const std::string> comment = {});
void write_data_trace(const std::string& path, const DataTrace& trace, std::span<const std::string> comment = {});

/// All four groups are present in the result; empty traces for absent groups.
[[nodiscard]] std::map<Group, DataTrace> split_by_group(const DataTrace& trace);

struct Split {
  DataTrace train;
  DataTrace test;
};

/// Random partition with |train| = round(fraction * n); both halves keep file order.
[[nodiscard]] Split train_test_split(const DataTrace& trace, double fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Event traces
// ---------------------------------------------------------------------------

using Symbol = std::string;

/// Ordered discrete events over a finite alphabet.
class EventTrace {
 public:
  EventTrace() = default;
  /// Alphabet is the set of symbols that occur.
  explicit EventTrace(std::vector<Symbol> events);
  /// Every event must belong to `alphabet`, which must be non-empty.
  EventTrace(std::vector<Symbol> events, std::vector<Symbol> alphabet);
  /// One symbol per character, e.g. "BBEBC".
  static EventTrace from_chars(std::string_view letters);

  [[nodiscard]] const std::vector<Symbol>& events() const noexcept { return events_; }
  [[nodiscard]] const std::vector<Symbol>& alphabet() const noexcept { return alphabet_; }
  [[nodiscard]] std::size_t size() const noexcept { return events_.size(); }
  [[nodiscard]] bool empty() const noexcept { return events_.empty(); }
  [[nodiscard]] const Symbol& operator[](std::size_t i) const { return events_.at(i); }
  [[nodiscard]] std::size_t count(std::string_view e) const noexcept;
  [[nodiscard]] bool contains(std::string_view e) const noexcept;

 private:
  std::vector<Symbol> events_;
  std::vector<Symbol> alphabet_;  // sorted, unique
};

/// Event slices aligned with the rows of a data trace.
struct RowEvents {
  std::vector<std::int64_t> timestamps;
  std::vector<EventTrace> slices;

  [[nodiscard]] std::size_t size() const noexcept { return slices.size(); }
  [[nodiscard]] EventTrace flatten() const;
  [[nodiscard]] RowEvents subset(std::span<const std::size_t> indices) const;
};

/// Plain event-trace text: one symbol per line; blank lines and '#' lines ignored.
[[nodiscard]] EventTrace read_event_trace(std::istream& in);
[[nodiscard]] EventTrace parse_event_trace(const std::string& path);
void write_event_trace(std::ostream& out, const EventTrace& trace, std::span<const std::string> comment = {});

/// Row-aligned variant: each slice is introduced by a "# row <ts>" line, so a
/// plain reader still sees the flattened trace.
[[nodiscard]] RowEvents read_row_events(std::istream& in);
[[nodiscard]] RowEvents parse_row_events(const std::string& path);
void write_row_events(std::ostream& out, const RowEvents& events, std::span<const std::string> comment = {});
void write_row_events(const std::string& path, const RowEvents& events, std::span<const std::string> comment = {});

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

using Rng = std::mt19937_64;

/// splitmix64 mix of (master, stream); independent sub-seeds per group etc.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;
/// 64-bit FNV-1a of `text` as 16 lowercase hex digits.
[[nodiscard]] std::string fnv1a_hex(std::string_view text);
/// Formats a double with the shortest round-tripping representation.
[[nodiscard]] std::string format_double(double v);

}  // namespace icn
