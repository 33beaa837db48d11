#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mlagg/data.hpp"

namespace mlagg::ingest {

struct DatasetDescriptor {
  std::string name;
  std::size_t num_labels = 0;
  std::size_t num_instances = 0;
  std::vector<std::string> label_names;
};

struct LabeledDataset {
  DatasetDescriptor descriptor;
  LabelMatrix labels;
};

/// Label matrix CSV: a header of label names, then one 0/1 row per instance.
LabeledDataset parse_label_matrix_csv(std::istream& in, const std::string& name = "csv");
LabeledDataset load_label_matrix_csv(const std::filesystem::path& path);
void write_label_matrix_csv(std::ostream& out, const std::vector<std::string>& label_names,
                            const LabelMatrix& labels);
void write_label_matrix_csv(const std::filesystem::path& path,
                            const std::vector<std::string>& label_names, const LabelMatrix& labels);

/// Extracts the named label columns of a MULAN-style ARFF file.
///
/// Supported subset: @relation, @attribute with numeric/real/integer or
/// nominal types, and @data rows in dense or sparse ("{index value, ...}")
/// syntax. Directives are case-insensitive and '%' lines are comments.
LabeledDataset parse_mulan_arff(std::istream& in, const std::vector<std::string>& label_names);
LabeledDataset load_mulan_arff(const std::filesystem::path& path,
                               const std::vector<std::string>& label_names);

/// One label name per line; blank lines ignored.
std::vector<std::string> read_label_names(const std::filesystem::path& path);

/// Loads a label CSV, or an ARFF file when `labels_file` is given.
LabeledDataset load_dataset(const std::filesystem::path& path,
                            const std::optional<std::filesystem::path>& labels_file);

/// Known dimensions for an annotation file. Missing values are inferred
/// (C from the first label string, N and L from the largest ids).
struct AnnotationShape {
  std::optional<std::size_t> num_instances;
  std::optional<std::size_t> num_labels;
  std::optional<std::size_t> num_annotators;
};

/// Annotation CSV with header "annotator,instance,labels".
AnnotationSet parse_annotations(std::istream& in, const AnnotationShape& shape = {});
AnnotationSet read_annotations(const std::filesystem::path& path,
                               const AnnotationShape& shape = {});
void write_annotations(std::ostream& out, const AnnotationSet& y);
void write_annotations(const AnnotationSet& y, const std::filesystem::path& path);

}  // namespace mlagg::ingest
