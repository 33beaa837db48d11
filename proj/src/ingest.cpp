#include "mlagg/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mlagg::ingest {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && lower(s.substr(0, prefix.size())) == prefix;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

// getline that strips a trailing '\r' so LF and CRLF files read the same.
bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

std::size_t parse_index(std::string_view text, std::size_t line_no, const char* what) {
  text = trim(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("line " + std::to_string(line_no) + ": invalid " + what + " '" +
                    std::string(text) + "'");
  }
  return value;
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

}  // namespace

LabeledDataset parse_label_matrix_csv(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t line_no = 0;
  // Skip leading blank lines; a file without a header is empty.
  bool have_header = false;
  while (read_line(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      have_header = true;
      break;
    }
  }
  if (!have_header) throw DataError(name + ": empty label file");

  LabeledDataset ds;
  ds.descriptor.name = name;
  std::unordered_set<std::string> seen;
  for (auto cell : split(line, ',')) {
    std::string label(trim(cell));
    if (label.empty()) throw DataError(name + ": line 1: empty label name");
    if (!seen.insert(label).second) {
      throw DataError(name + ": line 1: duplicate label name '" + label + "'");
    }
    ds.descriptor.label_names.push_back(std::move(label));
  }
  const std::size_t num_labels = ds.descriptor.label_names.size();

  std::vector<std::uint8_t> bits;
  std::size_t rows = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != num_labels) {
      throw DataError(name + ": line " + std::to_string(line_no) + ": expected " +
                      std::to_string(num_labels) + " cells, got " + std::to_string(cells.size()));
    }
    for (auto cell : cells) {
      cell = trim(cell);
      if (cell == "0") {
        bits.push_back(0);
      } else if (cell == "1") {
        bits.push_back(1);
      } else {
        throw DataError(name + ": line " + std::to_string(line_no) + ": non-binary cell '" +
                        std::string(cell) + "'");
      }
    }
    ++rows;
  }
  ds.labels.rows = rows;
  ds.labels.cols = num_labels;
  ds.labels.data = std::move(bits);
  ds.descriptor.num_labels = num_labels;
  ds.descriptor.num_instances = rows;
  return ds;
}

LabeledDataset load_label_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_label_matrix_csv(in, path.stem().string());
}

void write_label_matrix_csv(std::ostream& out, const std::vector<std::string>& label_names,
                            const LabelMatrix& labels) {
  for (std::size_t j = 0; j < label_names.size(); ++j) {
    out << (j ? "," : "") << label_names[j];
  }
  out << '\n';
  for (std::size_t i = 0; i < labels.rows; ++i) {
    for (std::size_t j = 0; j < labels.cols; ++j) {
      out << (j ? "," : "") << static_cast<int>(labels(i, j));
    }
    out << '\n';
  }
}

void write_label_matrix_csv(const std::filesystem::path& path,
                            const std::vector<std::string>& label_names,
                            const LabelMatrix& labels) {
  auto out = open_output(path);
  write_label_matrix_csv(out, label_names, labels);
}

namespace {

struct ArffAttribute {
  std::string name;
  bool nominal = false;
  std::vector<std::string> values;
};

ArffAttribute parse_attribute(std::string_view rest, std::size_t line_no) {
  rest = trim(rest);
  ArffAttribute attr;
  std::size_t name_end = 0;
  if (!rest.empty() && (rest.front() == '\'' || rest.front() == '"')) {
    const auto close = rest.find(rest.front(), 1);
    if (close == std::string_view::npos) {
      throw DataError("arff line " + std::to_string(line_no) + ": unterminated attribute name");
    }
    attr.name = std::string(rest.substr(1, close - 1));
    name_end = close + 1;
  } else {
    while (name_end < rest.size() && !std::isspace(static_cast<unsigned char>(rest[name_end])) &&
           rest[name_end] != '{') {
      ++name_end;
    }
    attr.name = std::string(rest.substr(0, name_end));
  }
  const auto type = trim(rest.substr(name_end));
  if (type.empty()) {
    throw DataError("arff line " + std::to_string(line_no) + ": attribute '" + attr.name +
                    "' has no type");
  }
  if (type.front() == '{') {
    if (type.back() != '}') {
      throw DataError("arff line " + std::to_string(line_no) + ": malformed nominal type");
    }
    attr.nominal = true;
    for (auto v : split(type.substr(1, type.size() - 2), ',')) attr.values.push_back(unquote(v));
  } else {
    const auto t = lower(type);
    if (t != "numeric" && t != "real" && t != "integer") {
      throw DataError("arff line " + std::to_string(line_no) + ": unsupported attribute type '" +
                      std::string(type) + "'");
    }
  }
  return attr;
}

std::uint8_t label_value(const ArffAttribute& attr, std::string_view raw, std::size_t line_no) {
  const auto value = unquote(raw);
  if (attr.nominal &&
      std::find(attr.values.begin(), attr.values.end(), value) == attr.values.end()) {
    throw DataError("arff line " + std::to_string(line_no) + ": value '" + value +
                    "' not declared for attribute '" + attr.name + "'");
  }
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() ||
      (x != 0.0 && x != 1.0)) {
    throw DataError("arff line " + std::to_string(line_no) + ": label '" + attr.name +
                    "' has non-binary value '" + value + "'");
  }
  return x == 1.0 ? 1 : 0;
}

}  // namespace

LabeledDataset parse_mulan_arff(std::istream& in, const std::vector<std::string>& label_names) {
  std::vector<ArffAttribute> attributes;
  std::string relation = "arff";
  std::string line;
  std::size_t line_no = 0;
  bool in_data = false;

  std::vector<std::size_t> label_columns;
  std::unordered_map<std::size_t, std::size_t> column_to_label;
  std::vector<std::uint8_t> bits;
  std::size_t rows = 0;

  auto resolve_labels = [&] {
    std::unordered_set<std::string> seen;
    for (const auto& name : label_names) {
      if (!seen.insert(name).second) throw DataError("duplicate label name '" + name + "'");
      const auto it = std::find_if(attributes.begin(), attributes.end(),
                                   [&](const ArffAttribute& a) { return a.name == name; });
      if (it == attributes.end()) {
        throw DataError("label '" + name + "' is not an attribute of the arff file");
      }
      const auto column = static_cast<std::size_t>(it - attributes.begin());
      column_to_label[column] = label_columns.size();
      label_columns.push_back(column);
    }
  };

  while (read_line(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '%') continue;
    if (!in_data) {
      if (text.front() != '@') {
        throw DataError("arff line " + std::to_string(line_no) + ": expected a directive");
      }
      if (starts_with_ci(text, "@relation")) {
        relation = unquote(text.substr(9));
      } else if (starts_with_ci(text, "@attribute")) {
        attributes.push_back(parse_attribute(text.substr(10), line_no));
      } else if (starts_with_ci(text, "@data")) {
        in_data = true;
        resolve_labels();
      } else {
        throw DataError("arff line " + std::to_string(line_no) + ": unknown directive");
      }
      continue;
    }

    std::vector<std::uint8_t> row(label_columns.size(), 0);
    if (text.front() == '{') {
      if (text.back() != '}') {
        throw DataError("arff line " + std::to_string(line_no) + ": unterminated sparse row");
      }
      const auto body = trim(text.substr(1, text.size() - 2));
      if (!body.empty()) {
        for (auto entry : split(body, ',')) {
          entry = trim(entry);
          const auto space = entry.find_first_of(" \t");
          if (space == std::string_view::npos) {
            throw DataError("arff line " + std::to_string(line_no) + ": malformed sparse entry '" +
                            std::string(entry) + "'");
          }
          const auto column = parse_index(entry.substr(0, space), line_no, "attribute index");
          if (column >= attributes.size()) {
            throw DataError("arff line " + std::to_string(line_no) +
                            ": attribute index out of range");
          }
          const auto it = column_to_label.find(column);
          if (it != column_to_label.end()) {
            row[it->second] = label_value(attributes[column], entry.substr(space + 1), line_no);
          }
        }
      }
    } else {
      const auto cells = split(text, ',');
      if (cells.size() != attributes.size()) {
        throw DataError("arff line " + std::to_string(line_no) + ": expected " +
                        std::to_string(attributes.size()) + " values, got " +
                        std::to_string(cells.size()));
      }
      for (std::size_t k = 0; k < label_columns.size(); ++k) {
        row[k] = label_value(attributes[label_columns[k]], cells[label_columns[k]], line_no);
      }
    }
    bits.insert(bits.end(), row.begin(), row.end());
    ++rows;
  }
  if (!in_data) throw DataError("arff file has no @data section");

  LabeledDataset ds;
  ds.descriptor.name = relation;
  ds.descriptor.label_names = label_names;
  ds.descriptor.num_labels = label_names.size();
  ds.descriptor.num_instances = rows;
  ds.labels.rows = rows;
  ds.labels.cols = label_names.size();
  ds.labels.data = std::move(bits);
  return ds;
}

LabeledDataset load_mulan_arff(const std::filesystem::path& path,
                               const std::vector<std::string>& label_names) {
  auto in = open_input(path);
  return parse_mulan_arff(in, label_names);
}

std::vector<std::string> read_label_names(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::vector<std::string> names;
  std::string line;
  while (read_line(in, line)) {
    const auto name = trim(line);
    if (!name.empty()) names.emplace_back(name);
  }
  if (names.empty()) throw DataError("label list '" + path.string() + "' is empty");
  return names;
}

LabeledDataset load_dataset(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& labels_file) {
  if (labels_file) return load_mulan_arff(path, read_label_names(*labels_file));
  return load_label_matrix_csv(path);
}

AnnotationSet parse_annotations(std::istream& in, const AnnotationShape& shape) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (trim(line) != "annotator,instance,labels") {
      throw DataError("annotations: line " + std::to_string(line_no) +
                      ": expected header 'annotator,instance,labels'");
    }
    have_header = true;
    break;
  }
  if (!have_header) throw DataError("annotations: empty file");

  std::optional<std::size_t> num_labels = shape.num_labels;
  std::vector<Annotation> records;
  std::size_t max_instance = 0;
  std::size_t max_annotator = 0;
  while (read_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != 3) {
      throw DataError("annotations: line " + std::to_string(line_no) + ": expected 3 cells");
    }
    Annotation rec;
    rec.annotator = parse_index(cells[0], line_no, "annotator id");
    rec.instance = parse_index(cells[1], line_no, "instance id");
    const auto bits = trim(cells[2]);
    if (!num_labels) num_labels = bits.size();
    if (bits.size() != *num_labels) {
      throw DataError("annotations: line " + std::to_string(line_no) + ": label string length " +
                      std::to_string(bits.size()) + " != " + std::to_string(*num_labels));
    }
    rec.labels.reserve(bits.size());
    for (char c : bits) {
      if (c != '0' && c != '1') {
        throw DataError("annotations: line " + std::to_string(line_no) +
                        ": label string must contain only 0 and 1");
      }
      rec.labels.push_back(c == '1' ? 1 : 0);
    }
    max_instance = std::max(max_instance, rec.instance);
    max_annotator = std::max(max_annotator, rec.annotator);
    records.push_back(std::move(rec));
  }
  const std::size_t n = shape.num_instances.value_or(records.empty() ? 0 : max_instance + 1);
  const std::size_t l = shape.num_annotators.value_or(records.empty() ? 0 : max_annotator + 1);
  return AnnotationSet(n, num_labels.value_or(0), l, std::move(records));
}

AnnotationSet read_annotations(const std::filesystem::path& path, const AnnotationShape& shape) {
  auto in = open_input(path);
  return parse_annotations(in, shape);
}

void write_annotations(std::ostream& out, const AnnotationSet& y) {
  out << "annotator,instance,labels\n";
  std::string bits(y.num_labels(), '0');
  for (std::size_t r = 0; r < y.size(); ++r) {
    const auto labels = y.labels(r);
    for (std::size_t j = 0; j < labels.size(); ++j) bits[j] = labels[j] ? '1' : '0';
    out << y.annotator(r) << ',' << y.instance(r) << ',' << bits << '\n';
  }
}

void write_annotations(const AnnotationSet& y, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_annotations(out, y);
}

}  // namespace mlagg::ingest
