#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hyperembed/io.hpp"
#include "hyperembed/types.hpp"
#include "support.hpp"

using namespace hyperembed;
namespace fs = std::filesystem;

namespace {

SparseIncidence two_edge_path() {
    IncidenceBuilder b(3);
    b.add_row({{0, 1.0}, {1, 1.0}});
    b.add_row({{1, 1.0}, {2, 1.0}});
    return b.finish();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("hyperembed_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

}  // namespace

TEST_CASE("degrees and volume on hand-evaluated structures") {
    SUBCASE("two unit-weight hyperedges sharing a node") {
        auto inc = two_edge_path();
        auto d = degrees_and_volume(inc, Eigen::Vector2d(1.0, 1.0));
        CHECK(d.node.isApprox(Eigen::Vector3d(1.0, 2.0, 1.0)));
        CHECK(d.edge.isApprox(Eigen::Vector2d(2.0, 2.0)));
        CHECK(d.volume == doctest::Approx(4.0));
    }
    SUBCASE("single hyperedge with weight 3") {
        IncidenceBuilder b(2);
        b.add_row({{0, 1.0}, {1, 1.0}});
        auto d = degrees_and_volume(b.finish(), Eigen::VectorXd::Constant(1, 3.0));
        CHECK(d.node.isApprox(Eigen::Vector2d(3.0, 3.0)));
        CHECK(d.edge[0] == doctest::Approx(2.0));
        CHECK(d.volume == doctest::Approx(6.0));
    }
    SUBCASE("non-unit incidence weights") {
        IncidenceBuilder b(2);
        b.add_row({{0, 0.5}, {1, 1.0}});
        auto d = degrees_and_volume(b.finish(), Eigen::VectorXd::Constant(1, 2.0));
        CHECK(d.node.isApprox(Eigen::Vector2d(1.0, 2.0)));
        CHECK(d.edge[0] == doctest::Approx(1.5));
        CHECK(d.volume == doctest::Approx(3.0));
    }
    SUBCASE("isolated node rejected") {
        IncidenceBuilder b(4);  // node 3 never appears
        b.add_row({{0, 1.0}, {1, 1.0}});
        b.add_row({{1, 1.0}, {2, 1.0}});
        CHECK_THROWS_AS(degrees_and_volume(b.finish(), Eigen::Vector2d(1.0, 1.0)),
                        DegenerateStructureError);
    }
}

TEST_CASE("degrees match an independent per-entry accumulation oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        auto ext = testing::random_extended(rng, 20, 15);
        // independent accumulation straight from the row data
        Eigen::VectorXd node = Eigen::VectorXd::Zero(ext.num_nodes());
        Eigen::VectorXd edge = Eigen::VectorXd::Zero(ext.num_rows());
        const auto& inc = ext.incidence;
        for (Index r = 0; r < inc.n_rows; ++r)
            for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p) {
                node[inc.col_indices[p]] += ext.edge_weights[r] * inc.values[p];
                edge[r] += inc.values[p];
            }
        CHECK((node - ext.node_degrees).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        CHECK((edge - ext.edge_degrees).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
        CHECK(ext.volume == doctest::Approx(node.sum()).epsilon(1e-12));
    }
}

TEST_CASE("volume additivity over stacked row blocks") {
    Rng rng(77);
    for (int trial = 0; trial < 10; ++trial) {
        auto a = testing::random_extended(rng, 12, 8);
        // second block over the same node set
        IncidenceBuilder b(a.num_nodes());
        for (Index r = 0; r < a.incidence.n_rows; ++r) {
            std::vector<std::pair<Index, double>> entries;
            for (Index p = a.incidence.row_offsets[r]; p < a.incidence.row_offsets[r + 1]; ++p)
                entries.emplace_back(a.incidence.col_indices[p], a.incidence.values[p] * 0.5);
            b.add_row(std::move(entries));
        }
        auto second = make_extended(b.finish(), a.edge_weights, a.incidence.n_rows);

        IncidenceBuilder stacked(a.num_nodes());
        for (const auto* part : {&a, &second}) {
            const auto& inc = part->incidence;
            for (Index r = 0; r < inc.n_rows; ++r) {
                std::vector<std::pair<Index, double>> entries;
                for (Index p = inc.row_offsets[r]; p < inc.row_offsets[r + 1]; ++p)
                    entries.emplace_back(inc.col_indices[p], inc.values[p]);
                stacked.add_row(std::move(entries));
            }
        }
        Eigen::VectorXd weights(a.num_rows() + second.num_rows());
        weights << a.edge_weights, second.edge_weights;
        auto whole = make_extended(stacked.finish(), weights, a.num_rows());
        CHECK(whole.volume == doctest::Approx(a.volume + second.volume).epsilon(1e-12));
    }
}

TEST_CASE("hypergraph file loading") {
    TempDir dir;
    SUBCASE("smallest valid input") {
        write_file(dir.file("h.txt"), "0 1\n1 2\n");
        write_file(dir.file("x.tsv"), "3 2\n1 0\n0 1\n1 1\n");
        auto hg = load_hypergraph(dir.file("h.txt"), dir.file("x.tsv"));
        CHECK(hg.num_edges() == 2);
        CHECK(hg.num_nodes() == 3);
        CHECK(hg.attributes.cols() == 2);
    }
    SUBCASE("comments and blank lines skipped") {
        write_file(dir.file("h.txt"), "# comment\n\n0 1\n# more\n1 2\n");
        write_file(dir.file("x.tsv"), "3 2\n1 0\n0 1\n1 1\n");
        CHECK(load_hypergraph(dir.file("h.txt"), dir.file("x.tsv")).num_edges() == 2);
    }
    SUBCASE("singleton hyperedge rejected") {
        write_file(dir.file("h.txt"), "0 1\n5\n");
        write_file(dir.file("x.tsv"), "2 1\n1\n1\n");
        CHECK_THROWS_AS(load_hypergraph(dir.file("h.txt"), dir.file("x.tsv")), ValidationError);
    }
    SUBCASE("malformed id names the line") {
        write_file(dir.file("h.txt"), "0 1\n1 x2\n");
        write_file(dir.file("x.tsv"), "2 1\n1\n1\n");
        try {
            load_hypergraph(dir.file("h.txt"), dir.file("x.tsv"));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("duplicate node within a hyperedge rejected") {
        write_file(dir.file("h.txt"), "0 1 1\n");
        write_file(dir.file("x.tsv"), "2 1\n1\n1\n");
        CHECK_THROWS_AS(load_hypergraph(dir.file("h.txt"), dir.file("x.tsv")), ValidationError);
    }
    SUBCASE("attribute row mismatch") {
        write_file(dir.file("h.txt"), "0 1\n1 2\n");
        write_file(dir.file("x.tsv"), "2 2\n1 0\n0 1\n");
        CHECK_THROWS_AS(load_hypergraph(dir.file("h.txt"), dir.file("x.tsv")), DimensionError);
    }
    SUBCASE("gappy ids densified in first-appearance order") {
        write_file(dir.file("h.txt"), "100 7\n7 420\n");
        write_file(dir.file("x.tsv"), "3 1\n1\n2\n3\n");
        std::vector<long long> id_map;
        auto hg = load_hypergraph(dir.file("h.txt"), dir.file("x.tsv"), "", "", &id_map);
        CHECK(hg.num_nodes() == 3);
        CHECK(id_map == std::vector<long long>{100, 7, 420});
        // first hyperedge saw ids 100,7 -> dense 0,1
        CHECK(hg.incidence.col_indices[0] == 0);
        CHECK(hg.incidence.col_indices[1] == 1);
    }
    SUBCASE("sparse COO attributes") {
        write_file(dir.file("h.txt"), "0 1\n");
        write_file(dir.file("x.tsv"), "sparse 2 3\n0 0 1.5\n1 2 -2\n");
        auto hg = load_hypergraph(dir.file("h.txt"), dir.file("x.tsv"));
        CHECK(hg.attributes(0, 0) == doctest::Approx(1.5));
        CHECK(hg.attributes(1, 2) == doctest::Approx(-2.0));
        CHECK(hg.attributes(0, 1) == doctest::Approx(0.0));
    }
    SUBCASE("node labels attach through the id map") {
        write_file(dir.file("h.txt"), "100 7\n7 420\n");
        write_file(dir.file("x.tsv"), "3 1\n1\n2\n3\n");
        write_file(dir.file("y.txt"), "100 2\n7 0\n420 1\n");
        auto hg = load_hypergraph(dir.file("h.txt"), dir.file("x.tsv"), dir.file("y.txt"));
        CHECK(*hg.node_labels == std::vector<int>{2, 0, 1});
    }
}

TEST_CASE("embedding serialization round trips") {
    TempDir dir;
    Rng rng(5);
    EmbeddingMatrix emb;
    emb.data.resize(3, 2);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 2; ++j) emb.data(i, j) = rng.normal() * 1e3;
    emb.eigenvalues = Eigen::Vector2d(2.5, 0.125);

    SUBCASE("binary is bit-exact") {
        save_embeddings(emb, dir.file("z.emb"), EmbeddingFormat::binary);
        auto back = load_embeddings(dir.file("z.emb"));
        CHECK(back.data == emb.data);
        CHECK(back.eigenvalues == emb.eigenvalues);
    }
    SUBCASE("text round trips to 1e-12 relative") {
        save_embeddings(emb, dir.file("z.txt"), EmbeddingFormat::text);
        auto back = load_embeddings(dir.file("z.txt"));
        for (Index i = 0; i < 3; ++i)
            for (Index j = 0; j < 2; ++j)
                CHECK(back.data(i, j) == doctest::Approx(emb.data(i, j)).epsilon(1e-12));
    }
    SUBCASE("truncated binary reports byte counts") {
        save_embeddings(emb, dir.file("z.emb"), EmbeddingFormat::binary);
        auto full = fs::file_size(dir.file("z.emb"));
        fs::resize_file(dir.file("z.emb"), full - 9);
        try {
            load_embeddings(dir.file("z.emb"));
            FAIL("expected IoError");
        } catch (const IoError& e) {
            std::string msg = e.what();
            CHECK(msg.find("expected") != std::string::npos);
            CHECK(msg.find(std::to_string(full)) != std::string::npos);
        }
    }
}

TEST_CASE("incidence invariant violations are rejected") {
    SparseIncidence inc;
    inc.n_rows = 1;
    inc.n_cols = 2;
    inc.row_offsets = {0, 2};
    inc.col_indices = {0, 1};
    inc.values = {1.0, 0.0};  // non-positive value
    CHECK_THROWS_AS(inc.validate(), ValidationError);
    inc.values = {1.0, 1.0};
    CHECK_NOTHROW(inc.validate());
    inc.col_indices = {1, 0};  // unsorted
    CHECK_THROWS_AS(inc.validate(), ValidationError);
}
