#include "hyperembed/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace hyperembed {

namespace {

constexpr char kMagic[4] = {'H', 'E', 'M', 'B'};
constexpr std::uint32_t kVersion = 1;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

bool is_comment_or_blank(const std::string& line) {
    for (char ch : line) {
        if (ch == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(ch))) return false;
    }
    return true;
}

struct EdgeList {
    std::vector<std::vector<long long>> edges;
    long long max_id = -1;
};

EdgeList read_edge_lines(const std::string& path) {
    auto in = open_input(path);
    EdgeList out;
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line)) continue;
        std::istringstream ss(line);
        std::vector<long long> ids;
        long long id;
        while (ss >> id) {
            if (id < 0)
                throw ParseError(path + ":" + std::to_string(line_no) + ": negative node id");
            ids.push_back(id);
            out.max_id = std::max(out.max_id, id);
        }
        if (!ss.eof())
            throw ParseError(path + ":" + std::to_string(line_no) + ": malformed node id");
        if (ids.size() < 2)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": hyperedge must contain at least 2 nodes");
        out.edges.push_back(std::move(ids));
    }
    return out;
}

Eigen::MatrixXd read_attributes(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!is_comment_or_blank(line)) break;
    }
    if (in.eof() && is_comment_or_blank(line)) throw ParseError(path + ": empty attribute file");

    std::istringstream header(line);
    std::string first;
    header >> first;
    if (first == "sparse") {
        Index n, q;
        if (!(header >> n >> q) || n <= 0 || q <= 0)
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad sparse header");
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, q);
        Index i, j;
        double v;
        while (std::getline(in, line)) {
            ++line_no;
            if (is_comment_or_blank(line)) continue;
            std::istringstream ss(line);
            if (!(ss >> i >> j >> v))
                throw ParseError(path + ":" + std::to_string(line_no) + ": bad COO triple");
            if (i < 0 || i >= n || j < 0 || j >= q)
                throw ParseError(path + ":" + std::to_string(line_no) + ": COO index out of range");
            X(i, j) = v;
        }
        return X;
    }

    Index n, q;
    {
        std::istringstream ss(line);
        if (!(ss >> n >> q) || n <= 0 || q <= 0)
            throw ParseError(path + ":" + std::to_string(line_no) + ": bad dense header");
    }
    Eigen::MatrixXd X(n, q);
    for (Index r = 0; r < n; ++r) {
        if (!std::getline(in, line))
            throw ParseError(path + ": expected " + std::to_string(n) + " attribute rows, got " +
                             std::to_string(r));
        ++line_no;
        std::istringstream ss(line);
        for (Index c = 0; c < q; ++c)
            if (!(ss >> X(r, c)))
                throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                                 std::to_string(q) + " values");
    }
    return X;
}

std::vector<int> read_labels(const std::string& path, Index count,
                             const std::unordered_map<long long, Index>* remap) {
    auto in = open_input(path);
    std::vector<int> labels(count, -1);
    std::vector<bool> seen(count, false);
    std::string line;
    Index line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_comment_or_blank(line)) continue;
        std::istringstream ss(line);
        long long id;
        int label;
        if (!(ss >> id >> label))
            throw ParseError(path + ":" + std::to_string(line_no) + ": expected 'id label'");
        Index idx;
        if (remap) {
            auto it = remap->find(id);
            if (it == remap->end())
                throw ParseError(path + ":" + std::to_string(line_no) + ": unknown id " +
                                 std::to_string(id));
            idx = it->second;
        } else {
            if (id < 0 || id >= count)
                throw ParseError(path + ":" + std::to_string(line_no) + ": id out of range");
            idx = static_cast<Index>(id);
        }
        labels[idx] = label;
        seen[idx] = true;
    }
    for (Index i = 0; i < count; ++i)
        if (!seen[i]) throw ParseError(path + ": missing label for index " + std::to_string(i));
    return labels;
}

template <typename T>
void write_raw(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::ifstream& in, const std::string& path) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError(path + ": truncated header");
    return value;
}

}  // namespace

AttributedHypergraph load_hypergraph(const std::string& hyperedge_path,
                                     const std::string& attribute_path,
                                     const std::string& node_label_path,
                                     const std::string& edge_label_path,
                                     std::vector<long long>* id_map) {
    EdgeList raw = read_edge_lines(hyperedge_path);
    Eigen::MatrixXd X = read_attributes(attribute_path);
    const Index n_attr = X.rows();

    std::unordered_map<long long, Index> remap;
    bool dense_ids = raw.max_id < n_attr;
    Index n;
    if (dense_ids) {
        n = n_attr;
    } else {
        for (const auto& e : raw.edges)
            for (long long id : e)
                remap.emplace(id, static_cast<Index>(remap.size()));
        n = static_cast<Index>(remap.size());
        if (n != n_attr)
            throw DimensionError(hyperedge_path + ": " + std::to_string(n) +
                                 " distinct node ids but attribute file has " +
                                 std::to_string(n_attr) + " rows");
    }

    IncidenceBuilder builder(n);
    for (const auto& e : raw.edges) {
        std::vector<std::pair<Index, double>> entries;
        entries.reserve(e.size());
        for (long long id : e) {
            Index idx = dense_ids ? static_cast<Index>(id) : remap.at(id);
            entries.emplace_back(idx, 1.0);
        }
        builder.add_row(std::move(entries));
    }

    AttributedHypergraph hg;
    hg.incidence = builder.finish();
    hg.attributes = std::move(X);

    const auto* remap_ptr = dense_ids ? nullptr : &remap;
    if (!node_label_path.empty())
        hg.node_labels = read_labels(node_label_path, n, remap_ptr);
    if (!edge_label_path.empty())
        hg.edge_labels = read_labels(edge_label_path, hg.incidence.n_rows, nullptr);

    if (id_map) {
        id_map->assign(n, 0);
        if (dense_ids) {
            for (Index i = 0; i < n; ++i) (*id_map)[i] = i;
        } else {
            for (const auto& [orig, idx] : remap) (*id_map)[idx] = orig;
        }
    }
    hg.validate();
    return hg;
}

void save_embeddings(const EmbeddingMatrix& emb, const std::string& path, EmbeddingFormat format) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    const Index rows = emb.rows(), k = emb.dim();
    if (format == EmbeddingFormat::binary) {
        out.write(kMagic, 4);
        write_raw(out, kVersion);
        write_raw(out, static_cast<std::uint64_t>(rows));
        write_raw(out, static_cast<std::uint64_t>(k));
        out.write(reinterpret_cast<const char*>(emb.eigenvalues.data()),
                  static_cast<std::streamsize>(k * sizeof(double)));
        // row-major payload
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < k; ++j) {
                double v = emb.data(i, j);
                write_raw(out, v);
            }
    } else {
        out.precision(17);
        out << rows << " " << k << "\n";
        for (Index j = 0; j < k; ++j) out << (j ? " " : "") << emb.eigenvalues[j];
        out << "\n";
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < k; ++j) out << (j ? " " : "") << emb.data(i, j);
            out << "\n";
        }
    }
    if (!out) throw IoError("write failed for " + path);
}

EmbeddingMatrix load_embeddings(const std::string& path) {
    auto in = open_input(path);
    char magic[4];
    in.read(magic, 4);
    if (in && std::memcmp(magic, kMagic, 4) == 0) {
        auto version = read_raw<std::uint32_t>(in, path);
        if (version != kVersion)
            throw IoError(path + ": unsupported version " + std::to_string(version));
        auto rows = static_cast<Index>(read_raw<std::uint64_t>(in, path));
        auto k = static_cast<Index>(read_raw<std::uint64_t>(in, path));
        EmbeddingMatrix emb;
        emb.eigenvalues.resize(k);
        in.read(reinterpret_cast<char*>(emb.eigenvalues.data()),
                static_cast<std::streamsize>(k * sizeof(double)));
        emb.data.resize(rows, k);
        std::vector<double> row(k);
        for (Index i = 0; i < rows; ++i) {
            in.read(reinterpret_cast<char*>(row.data()),
                    static_cast<std::streamsize>(k * sizeof(double)));
            for (Index j = 0; j < k; ++j) emb.data(i, j) = row[j];
        }
        if (!in) {
            in.clear();
            const auto expected = 4 + sizeof(kVersion) + 2 * sizeof(std::uint64_t) +
                                  static_cast<std::size_t>(k) * sizeof(double) +
                                  static_cast<std::size_t>(rows) * k * sizeof(double);
            in.seekg(0, std::ios::end);
            throw IoError(path + ": truncated payload, expected " + std::to_string(expected) +
                          " bytes, file has " + std::to_string(in.tellg()));
        }
        return emb;
    }

    // text format
    in.clear();
    in.seekg(0);
    Index rows, k;
    if (!(in >> rows >> k)) throw IoError(path + ": bad text header");
    EmbeddingMatrix emb;
    emb.eigenvalues.resize(k);
    for (Index j = 0; j < k; ++j)
        if (!(in >> emb.eigenvalues[j])) throw IoError(path + ": truncated eigenvalue row");
    emb.data.resize(rows, k);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < k; ++j)
            if (!(in >> emb.data(i, j)))
                throw IoError(path + ": truncated at row " + std::to_string(i));
    return emb;
}

void save_id_map(const std::vector<long long>& id_map, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    for (std::size_t i = 0; i < id_map.size(); ++i) out << i << " " << id_map[i] << "\n";
    if (!out) throw IoError("write failed for " + path);
}

void save_hypergraph(const AttributedHypergraph& hg, const std::string& prefix) {
    {
        std::ofstream out(prefix + ".hg", std::ios::trunc);
        if (!out) throw IoError("cannot create " + prefix + ".hg");
        const auto& inc = hg.incidence;
        for (Index r = 0; r < inc.n_rows; ++r) {
            for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p)
                out << (p == inc.row_offsets[r] ? "" : " ") << inc.col_indices[p];
            out << "\n";
        }
    }
    {
        std::ofstream out(prefix + ".attrs", std::ios::trunc);
        if (!out) throw IoError("cannot create " + prefix + ".attrs");
        out.precision(17);
        out << hg.attributes.rows() << " " << hg.attributes.cols() << "\n";
        for (Index i = 0; i < hg.attributes.rows(); ++i) {
            for (Index j = 0; j < hg.attributes.cols(); ++j)
                out << (j ? " " : "") << hg.attributes(i, j);
            out << "\n";
        }
    }
    if (hg.node_labels) {
        std::ofstream out(prefix + ".node-labels", std::ios::trunc);
        for (Index i = 0; i < static_cast<Index>(hg.node_labels->size()); ++i)
            out << i << " " << (*hg.node_labels)[i] << "\n";
    }
    if (hg.edge_labels) {
        std::ofstream out(prefix + ".edge-labels", std::ios::trunc);
        for (Index i = 0; i < static_cast<Index>(hg.edge_labels->size()); ++i)
            out << i << " " << (*hg.edge_labels)[i] << "\n";
    }
}

void save_extended(const ExtendedHypergraph& ext, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create " + path);
    out.precision(17);
    out << ext.num_rows() << " " << ext.num_nodes() << " " << ext.m_original << " " << ext.volume
        << "\n";
    const auto& inc = ext.incidence;
    for (Index r = 0; r < inc.n_rows; ++r) {
        out << ext.edge_weights[r];
        for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p)
            out << " " << inc.col_indices[p] << ":" << inc.values[p];
        out << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace hyperembed
