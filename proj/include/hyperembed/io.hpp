#ifndef HYPEREMBED_IO_HPP
#define HYPEREMBED_IO_HPP

#include <string>
#include <vector>

#include "hyperembed/types.hpp"

namespace hyperembed {

enum class EmbeddingFormat { binary, text };

/// Loads a hypergraph from text files.
///
/// Hyperedge file: one hyperedge per line, whitespace-separated node ids,
/// lines starting with '#' are comments. Attribute file: dense ("n q" header
/// then n rows of q reals) or sparse COO ("sparse n q" header then
/// "i j value" triples). Label files: "node_id label" pairs.
///
/// Node ids may be arbitrary non-negative integers. If every id is below the
/// attribute row count they are taken as already dense; otherwise ids are
/// remapped to [0, n) in first-appearance order. When id_map is non-null it
/// receives original_id per dense index.
AttributedHypergraph load_hypergraph(const std::string& hyperedge_path,
                                     const std::string& attribute_path,
                                     const std::string& node_label_path = "",
                                     const std::string& edge_label_path = "",
                                     std::vector<long long>* id_map = nullptr);

void save_embeddings(const EmbeddingMatrix& emb, const std::string& path, EmbeddingFormat format);
EmbeddingMatrix load_embeddings(const std::string& path);

void save_id_map(const std::vector<long long>& id_map, const std::string& path);

/// Writes hyperedge/attribute/label files for a generated hypergraph so the
/// CLI generators round-trip through load_hypergraph.
void save_hypergraph(const AttributedHypergraph& hg, const std::string& prefix);

/// Extended-hypergraph dump: header "rows n m_original volume", then one row
/// per hyperedge as "weight col:value ...".
void save_extended(const ExtendedHypergraph& ext, const std::string& path);

}  // namespace hyperembed

#endif
