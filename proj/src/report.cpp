#include "kreinlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "kreinlab/errors.hpp"

namespace kreinlab {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

JsonValue JsonValue::boolean(bool b) {
  JsonValue v;
  v.kind_ = Kind::Boolean;
  v.bool_ = b;
  return v;
}

JsonValue JsonValue::integer(long long i) {
  JsonValue v;
  v.kind_ = Kind::Integer;
  v.int_ = i;
  return v;
}

JsonValue JsonValue::number(double x) {
  JsonValue v;
  if (!std::isfinite(x)) return v;  // null
  v.kind_ = Kind::Number;
  v.num_ = x;
  return v;
}

JsonValue JsonValue::string(std::string s) {
  JsonValue v;
  v.kind_ = Kind::String;
  v.str_ = std::move(s);
  return v;
}

JsonValue JsonValue::array() {
  JsonValue v;
  v.kind_ = Kind::Array;
  return v;
}

JsonValue JsonValue::object() {
  JsonValue v;
  v.kind_ = Kind::Object;
  return v;
}

JsonValue& JsonValue::set(const std::string& key, JsonValue value) {
  if (kind_ != Kind::Object)
    throw ContractError("JsonValue::set called on a non-object");
  members_.emplace_back(key, std::move(value));
  return *this;
}

JsonValue& JsonValue::push(JsonValue value) {
  if (kind_ != Kind::Array)
    throw ContractError("JsonValue::push called on a non-array");
  items_.push_back(std::move(value));
  return *this;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void write_newline_indent(std::string& out, int indent, int depth) {
  if (indent <= 0) return;
  out += '\n';
  out.append(static_cast<std::size_t>(indent) * depth, ' ');
}

}  // namespace

void JsonValue::write(std::string& out, int indent, int depth) const {
  switch (kind_) {
    case Kind::Null:
      out += "null";
      return;
    case Kind::Boolean:
      out += bool_ ? "true" : "false";
      return;
    case Kind::Integer: {
      out += std::to_string(int_);
      return;
    }
    case Kind::Number:
      out += format_double(num_);
      return;
    case Kind::String:
      write_escaped(out, str_);
      return;
    case Kind::Array: {
      if (items_.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ',';
        write_newline_indent(out, indent, depth + 1);
        items_[i].write(out, indent, depth + 1);
      }
      write_newline_indent(out, indent, depth);
      out += ']';
      return;
    }
    case Kind::Object: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i) out += ',';
        write_newline_indent(out, indent, depth + 1);
        write_escaped(out, members_[i].first);
        out += indent > 0 ? ": " : ":";
        members_[i].second.write(out, indent, depth + 1);
      }
      write_newline_indent(out, indent, depth);
      out += '}';
      return;
    }
  }
}

std::string JsonValue::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  return out;
}

CheckResult CheckResult::measured(std::string name, std::string anchor,
                                  double residual, double tolerance,
                                  std::string note) {
  CheckResult c;
  c.name = std::move(name);
  c.paper_anchor = std::move(anchor);
  // NaN compares false, so a NaN residual is reported as a failure.
  c.status = (residual <= tolerance) ? "pass" : "fail";
  c.residual = residual;
  c.tolerance = tolerance;
  c.note = std::move(note);
  return c;
}

CheckResult CheckResult::skipped(std::string name, std::string anchor,
                                 std::string note) {
  CheckResult c;
  c.name = std::move(name);
  c.paper_anchor = std::move(anchor);
  c.status = "skipped";
  c.note = std::move(note);
  return c;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (c.status == "fail") return false;
  return true;
}

JsonValue check_to_json(const CheckResult& check) {
  JsonValue j = JsonValue::object();
  j.set("name", JsonValue::string(check.name));
  j.set("paper_anchor", JsonValue::string(check.paper_anchor));
  j.set("status", JsonValue::string(check.status));
  j.set("residual", JsonValue::number(check.residual));
  j.set("tolerance", JsonValue::number(check.tolerance));
  j.set("note", JsonValue::string(check.note));
  return j;
}

void Report::add_table(const std::string& name, JsonValue table) {
  tables.emplace_back(name, std::move(table));
}

JsonValue Report::to_json() const {
  JsonValue root = JsonValue::object();
  root.set("tool", JsonValue::string(kToolName));
  root.set("version", JsonValue::string(kToolVersion));
  root.set("task", JsonValue::string(task));
  root.set("config", config);
  root.set("options", options);

  long long passed = 0, failed = 0, skipped_count = 0;
  for (const auto& c : checks) {
    if (c.status == "pass") ++passed;
    else if (c.status == "fail") ++failed;
    else ++skipped_count;
  }
  JsonValue summary = JsonValue::object();
  summary.set("passed", JsonValue::integer(passed));
  summary.set("failed", JsonValue::integer(failed));
  summary.set("skipped", JsonValue::integer(skipped_count));
  summary.set("status", JsonValue::string(failed == 0 ? "pass" : "fail"));
  root.set("summary", std::move(summary));

  JsonValue checks_json = JsonValue::array();
  for (const auto& c : checks) checks_json.push(check_to_json(c));
  root.set("checks", std::move(checks_json));

  JsonValue tables_json = JsonValue::object();
  for (const auto& [name, table] : tables) tables_json.set(name, table);
  root.set("tables", std::move(tables_json));

  root.set("timings", timings);
  return root;
}

std::string Report::serialize() const { return to_json().dump(2) + "\n"; }

JsonValue spectra_table(const std::vector<SpectrumRow>& rows) {
  JsonValue out = JsonValue::array();
  for (const auto& r : rows) {
    JsonValue j = JsonValue::object();
    j.set("index", JsonValue::integer(r.index));
    j.set("eigenvalue", JsonValue::number(r.eigenvalue));
    j.set("multiplicity", JsonValue::integer(r.multiplicity));
    j.set("method", JsonValue::string(r.method));
    out.push(std::move(j));
  }
  return out;
}

JsonValue dtn_grid_table(const std::vector<DtnGridRow>& rows) {
  JsonValue out = JsonValue::array();
  for (const auto& r : rows) {
    JsonValue j = JsonValue::object();
    j.set("z_re", JsonValue::number(r.z.real()));
    j.set("z_im", JsonValue::number(r.z.imag()));
    j.set("row", JsonValue::integer(r.row));
    j.set("col", JsonValue::integer(r.col));
    j.set("entry_re", JsonValue::number(r.entry.real()));
    j.set("entry_im", JsonValue::number(r.entry.imag()));
    out.push(std::move(j));
  }
  return out;
}

std::string spectra_csv(const std::vector<SpectrumRow>& rows) {
  std::string out = "index,eigenvalue,multiplicity,method\n";
  for (const auto& r : rows) {
    out += std::to_string(r.index);
    out += ',';
    out += format_double(r.eigenvalue);
    out += ',';
    out += std::to_string(r.multiplicity);
    out += ',';
    out += r.method;
    out += '\n';
  }
  return out;
}

std::string dtn_grid_csv(const std::vector<DtnGridRow>& rows) {
  std::string out = "z_re,z_im,row,col,entry_re,entry_im\n";
  for (const auto& r : rows) {
    out += format_double(r.z.real());
    out += ',';
    out += format_double(r.z.imag());
    out += ',';
    out += std::to_string(r.row);
    out += ',';
    out += std::to_string(r.col);
    out += ',';
    out += format_double(r.entry.real());
    out += ',';
    out += format_double(r.entry.imag());
    out += '\n';
  }
  return out;
}

std::string convergence_csv(const std::vector<CsvConvergenceRow>& rows) {
  std::string out = "n,h,error,rate\n";
  for (const auto& r : rows) {
    out += std::to_string(r.n);
    out += ',';
    out += format_double(r.h);
    out += ',';
    out += format_double(r.error);
    out += ',';
    if (std::isfinite(r.rate)) out += format_double(r.rate);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream stream(path, std::ios::binary | std::ios::trunc);
  if (!stream.is_open()) throw Error("cannot open for writing: " + path);
  stream.write(content.data(),
               static_cast<std::streamsize>(content.size()));
  stream.flush();
  if (!stream.good()) throw Error("write failed: " + path);
}

}  // namespace kreinlab
