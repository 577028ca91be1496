#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kreinlab/types.hpp"

namespace kreinlab {

inline constexpr const char* kToolName = "kreinlab";
inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest-round-trip style float formatting used everywhere numbers leave
/// the library (JSON reports and CSV tables): printf "%.17g", which
/// reproduces every IEEE double bit-exactly on parse.  Non-finite values map
/// to "null" so the output stays valid JSON.
std::string format_double(double x);

/// A tiny ordered JSON document: object keys keep insertion order, numbers
/// are written with format_double, and dump() is a pure function of the
/// tree, so identical inputs give byte-identical text.
class JsonValue {
 public:
  enum class Kind { Null, Boolean, Integer, Number, String, Array, Object };

  JsonValue() : kind_(Kind::Null) {}

  static JsonValue null() { return JsonValue(); }
  static JsonValue boolean(bool b);
  static JsonValue integer(long long i);
  /// Non-finite doubles become JSON null.
  static JsonValue number(double x);
  static JsonValue string(std::string s);
  static JsonValue array();
  static JsonValue object();

  Kind kind() const { return kind_; }
  bool is_object() const { return kind_ == Kind::Object; }
  bool is_array() const { return kind_ == Kind::Array; }

  /// Appends a key to an object (keys are written in insertion order).
  JsonValue& set(const std::string& key, JsonValue value);
  /// Appends an element to an array.
  JsonValue& push(JsonValue value);

  std::string dump(int indent = 2) const;

 private:
  void write(std::string& out, int indent, int depth) const;

  Kind kind_;
  bool bool_ = false;
  long long int_ = 0;
  double num_ = 0.0;
  std::string str_;
  std::vector<JsonValue> items_;
  std::vector<std::pair<std::string, JsonValue>> members_;
};

/// One named verification check: what was measured, against which tolerance,
/// and the anchor label that reports carry for every check.
struct CheckResult {
  std::string name;
  std::string paper_anchor;
  std::string status;  ///< "pass" | "fail" | "skipped"
  double residual = 0.0;
  double tolerance = 0.0;
  std::string note;

  static CheckResult measured(std::string name, std::string anchor,
                              double residual, double tolerance,
                              std::string note = "");
  static CheckResult skipped(std::string name, std::string anchor,
                             std::string note);
};

bool all_passed(const std::vector<CheckResult>& checks);

JsonValue check_to_json(const CheckResult& check);

/// Assembled report document.  Field order is fixed; add tables in a fixed
/// order so identical runs serialize byte-identically.
struct Report {
  std::string task;
  JsonValue config = JsonValue::object();
  JsonValue options = JsonValue::object();
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, JsonValue>> tables;
  JsonValue timings = JsonValue::object();

  void add_table(const std::string& name, JsonValue table);
  JsonValue to_json() const;
  /// Full JSON text, trailing newline included.
  std::string serialize() const;
};

/// Rows of the tabular sections shared by report JSON and CSV export.
struct SpectrumRow {
  int index = 0;
  double eigenvalue = 0.0;
  int multiplicity = 1;
  std::string method;
};

struct DtnGridRow {
  Complex z;
  int row = 0;
  int col = 0;
  Complex entry;
};

JsonValue spectra_table(const std::vector<SpectrumRow>& rows);
JsonValue dtn_grid_table(const std::vector<DtnGridRow>& rows);

/// CSV writers.  Headers are fixed:
///   spectra:      index,eigenvalue,multiplicity,method
///   DtN grid:     z_re,z_im,row,col,entry_re,entry_im
///   convergence:  n,h,error,rate   (undefined rates print as empty cells)
std::string spectra_csv(const std::vector<SpectrumRow>& rows);
std::string dtn_grid_csv(const std::vector<DtnGridRow>& rows);
struct CsvConvergenceRow {
  int n = 0;
  double h = 0.0;
  double error = 0.0;
  double rate = 0.0;  ///< NaN when undefined
};
std::string convergence_csv(const std::vector<CsvConvergenceRow>& rows);

/// Writes `content` to `path` (binary, exact bytes); throws Error on any
/// I/O failure so callers can map it to a runtime exit code.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace kreinlab
