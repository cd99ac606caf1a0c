#include "sparseclust/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace sparseclust::io {

using nlohmann::json;

namespace {

constexpr std::array<char, 4> kMagic{'S', 'P', 'C', 'L'};

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T to_little_endian(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&v, bytes, sizeof(T));
    return v;
  }
}

template <class T>
void write_raw(std::ostream& out, T v) {
  v = to_little_endian(v);
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::istream& in) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError("similarity binary: truncated input");
  return to_little_endian(v);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view field, std::size_t line) {
  const std::string text(trim(field));
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size())
    throw IoError("line " + std::to_string(line) + ": bad number '" + text + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view field, std::size_t line) {
  field = trim(field);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
    throw IoError("line " + std::to_string(line) + ": bad integer '" + std::string(field) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

NodeId build_tree_node(const json& j, ClusterTree::Builder& builder) {
  if (!j.is_object()) throw IoError("tree JSON: node must be an object");
  if (j.contains("leaf")) {
    const json& leaf = j.at("leaf");
    if (!leaf.is_number_integer() || leaf.get<std::int64_t>() < 0)
      throw IoError("tree JSON: \"leaf\" must be a non-negative integer");
    return builder.leaf(leaf.get<ItemId>());
  }
  if (j.contains("children")) {
    const json& kids = j.at("children");
    if (!kids.is_array() || kids.size() != 2)
      throw IoError("tree JSON: \"children\" must hold exactly two nodes");
    const NodeId left = build_tree_node(kids[0], builder);
    const NodeId right = build_tree_node(kids[1], builder);
    return builder.join(left, right);
  }
  throw IoError("tree JSON: node needs \"leaf\" or \"children\"");
}

json tree_node_json(const ClusterTree& tree, NodeId id) {
  const TreeNode& node = tree.node(id);
  if (node.is_leaf()) return json{{"leaf", node.item}};
  return json{{"children", json::array({tree_node_json(tree, node.left),
                                        tree_node_json(tree, node.right)})}};
}

void newick_node(const ClusterTree& tree, NodeId id, std::string& out) {
  const TreeNode& node = tree.node(id);
  if (node.is_leaf()) {
    out += std::to_string(node.item);
    return;
  }
  out += '(';
  newick_node(tree, node.left, out);
  out += ',';
  newick_node(tree, node.right, out);
  out += ')';
}

json forest_node_json(const MergeForest& forest, ClusterId id) {
  if (id < forest.n) return json{{"leaf", id}};
  const auto [a, b] = forest.children(id);
  return json{{"children", json::array({forest_node_json(forest, a), forest_node_json(forest, b)})}};
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Trees and forests

json tree_to_json(const ClusterTree& tree) { return tree_node_json(tree, tree.root()); }

ClusterTree tree_from_json(const json& j) {
  ClusterTree::Builder builder;
  try {
    const NodeId root = build_tree_node(j, builder);
    return builder.build(root);
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("tree JSON: ") + e.what());
  } catch (const json::exception& e) {
    throw IoError(std::string("tree JSON: ") + e.what());
  }
}

std::string to_newick(const ClusterTree& tree) {
  std::string out;
  newick_node(tree, tree.root(), out);
  out += ';';
  return out;
}

json forest_to_json(const MergeForest& forest) {
  json merges = json::array();
  for (const Merge& m : forest.merges) merges.push_back(json::array({m.a, m.b, m.similarity}));
  json trees = json::array();
  for (ClusterId root : forest.roots) trees.push_back(forest_node_json(forest, root));
  return json{{"n", forest.n},
              {"forced_halt", forest.forced_halt},
              {"merges", std::move(merges)},
              {"roots", forest.roots},
              {"trees", std::move(trees)}};
}

MergeForest forest_from_json(const json& j) {
  try {
    MergeForest forest;
    forest.n = j.at("n").get<std::size_t>();
    std::vector<char> used;
    std::vector<ItemId> min_item(forest.n);
    for (ItemId i = 0; i < forest.n; ++i) min_item[i] = i;
    used.assign(forest.n, 0);
    for (const json& m : j.at("merges")) {
      if (!m.is_array() || m.size() != 3) throw IoError("forest JSON: merge must be [a, b, s]");
      const Merge merge{m[0].get<ClusterId>(), m[1].get<ClusterId>(), m[2].get<double>()};
      const std::size_t next = forest.n + forest.merges.size();
      if (merge.a >= next || merge.b >= next || merge.a == merge.b || used[merge.a] || used[merge.b])
        throw IoError("forest JSON: merge " + std::to_string(forest.merges.size()) +
                      " references an unknown or already merged cluster");
      if (min_item[merge.a] > min_item[merge.b])
        throw IoError("forest JSON: merge " + std::to_string(forest.merges.size()) +
                      " must list the side holding the smaller item first");
      if (!(merge.similarity > 0.0) ||
          (!forest.merges.empty() && merge.similarity > forest.merges.back().similarity))
        throw IoError("forest JSON: merge similarities must be positive and non-increasing");
      used[merge.a] = used[merge.b] = 1;
      used.push_back(0);
      min_item.push_back(std::min(min_item[merge.a], min_item[merge.b]));
      forest.merges.push_back(merge);
    }
    for (ClusterId c = 0; c < used.size(); ++c)
      if (!used[c]) forest.roots.push_back(c);
    std::sort(forest.roots.begin(), forest.roots.end(),
              [&](ClusterId x, ClusterId y) { return min_item[x] < min_item[y]; });
    forest.forced_halt = forest.roots.size() > 1;
    if (j.contains("forced_halt") && j.at("forced_halt").get<bool>() != forest.forced_halt)
      throw IoError("forest JSON: forced_halt disagrees with the merge list");
    return forest;
  } catch (const json::exception& e) {
    throw IoError(std::string("forest JSON: ") + e.what());
  }
}

json report_to_json(const RecoveryReport& report) {
  json clusters = json::array();
  for (const auto& [members, hit] : report.per_cluster)
    clusters.push_back(json{{"items", members}, {"recovered", hit}});
  return json{{"n_min", report.n_min},
              {"total_clusters", report.total_clusters},
              {"recovered", report.recovered},
              {"fully_recovered", report.fully_recovered},
              {"clusters", std::move(clusters)}};
}

// ---------------------------------------------------------------------------
// Similarity matrices

void write_similarity_csv(const SimilarityMatrix& sim, std::ostream& out) {
  const std::size_t n = sim.size();
  for (ItemId i = 0; i < n; ++i) {
    for (ItemId j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(i == j ? 0.0 : sim(i, j));
    }
    out << '\n';
  }
}

void write_similarity_binary(const SimilarityMatrix& sim, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(sim.size()));
  for (double v : sim.data()) write_raw<double>(out, v);
}

SimilarityMatrix read_similarity_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t rows = 0, cols = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (rows == 0) cols = fields.size();
    if (fields.size() != cols)
      throw IoError("similarity CSV line " + std::to_string(line_no) + ": expected " +
                    std::to_string(cols) + " columns");
    for (auto f : fields) values.push_back(parse_double(f, line_no));
    ++rows;
  }
  if (rows != cols) throw IoError("similarity CSV: matrix is not square");
  try {
    return SimilarityMatrix(rows, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("similarity CSV: ") + e.what());
  }
}

SimilarityMatrix read_similarity_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw IoError("similarity binary: missing SPCL magic");
  const auto n = read_raw<std::uint32_t>(in);
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (double& v : values) v = read_raw<double>(in);
  try {
    return SimilarityMatrix(n, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("similarity binary: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Masks

void write_mask_csv(const ObservationMask& mask, std::ostream& out) {
  out << "# n=" << mask.size() << " p=" << format_double(mask.p_nominal()) << '\n';
  for (auto [i, j] : mask.observed_pairs()) out << i << ',' << j << '\n';
}

ObservationMask read_mask_csv(std::istream& in, std::optional<std::size_t> n) {
  std::optional<std::size_t> header_n;
  std::optional<double> header_p;
  std::vector<ObservationMask::Pair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text == "i,j") continue;
    if (text.front() == '#') {
      std::istringstream fields{std::string(text.substr(1))};
      std::string field;
      while (fields >> field) {
        if (field.rfind("n=", 0) == 0) header_n = parse_uint(std::string_view(field).substr(2), line_no);
        if (field.rfind("p=", 0) == 0) header_p = parse_double(std::string_view(field).substr(2), line_no);
      }
      continue;
    }
    const auto cols = split(text, ',');
    if (cols.size() != 2) throw IoError("mask CSV line " + std::to_string(line_no) + ": expected i,j");
    pairs.emplace_back(static_cast<ItemId>(parse_uint(cols[0], line_no)),
                       static_cast<ItemId>(parse_uint(cols[1], line_no)));
  }
  if (n && header_n && *n != *header_n)
    throw IoError("mask CSV: header says n=" + std::to_string(*header_n) + " but " +
                  std::to_string(*n) + " items were expected");
  const auto size = n ? n : header_n;
  if (!size) throw IoError("mask CSV: item count unknown (no '# n=' header)");
  const double total = static_cast<double>(*size) * static_cast<double>(*size - 1) / 2.0;
  const double p = header_p ? *header_p : (total > 0 ? static_cast<double>(pairs.size()) / total : 1.0);
  try {
    return ObservationMask::from_pairs(*size, pairs, p);
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("mask CSV: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Files

json read_json_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("'" + path.string() + "': " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  out << text;
  close_checked(out, path);
}

ClusterTree read_tree_file(const std::filesystem::path& path) {
  return tree_from_json(read_json_file(path));
}

void write_similarity_file(const std::filesystem::path& path, const SimilarityMatrix& sim) {
  auto out = open_out(path, std::ios::out | std::ios::binary);
  if (path.extension() == ".bin")
    write_similarity_binary(sim, out);
  else
    write_similarity_csv(sim, out);
  close_checked(out, path);
}

SimilarityMatrix read_similarity_file(const std::filesystem::path& path) {
  auto in = open_in(path, std::ios::in | std::ios::binary);
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  const bool binary = in.gcount() == 4 && head == kMagic;
  in.clear();
  in.seekg(0);
  return binary ? read_similarity_binary(in) : read_similarity_csv(in);
}

void write_mask_file(const std::filesystem::path& path, const ObservationMask& mask) {
  auto out = open_out(path);
  write_mask_csv(mask, out);
  close_checked(out, path);
}

ObservationMask read_mask_file(const std::filesystem::path& path, std::optional<std::size_t> n) {
  auto in = open_in(path);
  return read_mask_csv(in, n);
}

}  // namespace sparseclust::io
