#pragma once

// File formats.
//
//   Tree JSON         {"leaf": <int>} | {"children": [<node>, <node>]}
//   Similarity CSV    N rows of N comma-separated values (diagonal written as 0)
//   Similarity binary "SPCL", u32 N (little-endian), N*N row-major f64 (little-endian)
//   Mask CSV          optional "# n=<N> p=<p>" header, then one "i,j" line per
//                     observed pair with i < j
//   Forest JSON       {"n", "forced_halt", "merges": [[a, b, s], ...], "roots",
//                      "trees": [<tree JSON per root>]}

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "sparseclust/clustering.hpp"
#include "sparseclust/core_model.hpp"

namespace sparseclust::io {

/// Raised for unreadable/unwritable files and malformed file contents.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json tree_to_json(const ClusterTree& tree);
ClusterTree tree_from_json(const nlohmann::json& j);
std::string to_newick(const ClusterTree& tree);

nlohmann::json forest_to_json(const MergeForest& forest);
MergeForest forest_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const RecoveryReport& report);

void write_similarity_csv(const SimilarityMatrix& sim, std::ostream& out);
void write_similarity_binary(const SimilarityMatrix& sim, std::ostream& out);
SimilarityMatrix read_similarity_csv(std::istream& in);
SimilarityMatrix read_similarity_binary(std::istream& in);

void write_mask_csv(const ObservationMask& mask, std::ostream& out);
/// `n` is required when the stream has no "# n=" header; when both are
/// present they must agree.
ObservationMask read_mask_csv(std::istream& in, std::optional<std::size_t> n = std::nullopt);

// File helpers. Similarity files are binary when the extension is ".bin" and
// CSV otherwise on write; on read the "SPCL" magic decides.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);
ClusterTree read_tree_file(const std::filesystem::path& path);
void write_similarity_file(const std::filesystem::path& path, const SimilarityMatrix& sim);
SimilarityMatrix read_similarity_file(const std::filesystem::path& path);
void write_mask_file(const std::filesystem::path& path, const ObservationMask& mask);
ObservationMask read_mask_file(const std::filesystem::path& path,
                               std::optional<std::size_t> n = std::nullopt);

}  // namespace sparseclust::io
