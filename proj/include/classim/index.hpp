#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "classim/embed.hpp"

namespace classim::index {

using embed::Vector;

enum class IndexMode { exact, hnsw };

struct HnswParams {
    int M = 16;
    int ef_construction = 200;
    int ef_search = 64;
};

struct SearchHit {
    std::string id;
    float cosine;
};

namespace detail {
class HnswGraph;
}

// Append-only vector index over unit-norm embeddings keyed by chunk id.
// exact mode returns the true top-k (ties broken by id); hnsw is approximate.
class VectorIndex {
  public:
    explicit VectorIndex(int dimension, IndexMode mode = IndexMode::exact,
                         HnswParams params = {});
    // The hnsw graph keeps a pointer into the stored vectors; heap-allocate
    // the index (see StudentKb) instead of moving it.
    VectorIndex(VectorIndex&&) = delete;
    VectorIndex& operator=(VectorIndex&&) = delete;
    ~VectorIndex();

    void add(const std::string& id, Vector v);

    std::vector<SearchHit> knn(const Vector& query, int k) const;
    // Serial exact scan regardless of mode; reference for tests and benchmarks.
    std::vector<SearchHit> knn_exact_serial(const Vector& query, int k) const;

    int dimension() const { return dimension_; }
    IndexMode mode() const { return mode_; }
    const HnswParams& params() const { return params_; }
    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const Vector& vector_at(std::size_t i) const { return vectors_[i]; }

  private:
    std::vector<SearchHit> knn_exact_parallel(const Vector& query, int k) const;
    std::vector<SearchHit> knn_hnsw(const Vector& query, int k) const;

    int dimension_;
    IndexMode mode_;
    HnswParams params_;
    std::vector<std::string> ids_;
    std::vector<Vector> vectors_;
    std::unique_ptr<detail::HnswGraph> graph_;
};

}  // namespace classim::index
