#include "classim/index.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace classim::index {

namespace detail {

// Compact HNSW over inner-product similarity on unit vectors.
class HnswGraph {
  public:
    HnswGraph(const std::vector<Vector>* vectors, HnswParams params)
        : vectors_(vectors), params_(params), level_scale_(1.0 / std::log(double(params.M))),
          rng_(0x9e3779b97f4a7c15ULL) {}

    void insert(int idx) {
        const int level = random_level();
        nodes_.push_back(Node{idx, level, std::vector<std::vector<int>>(level + 1)});
        const int node = static_cast<int>(nodes_.size()) - 1;
        if (node == 0) {
            entry_ = 0;
            max_level_ = level;
            return;
        }

        int cur = entry_;
        for (int l = max_level_; l > level; --l) cur = greedy_closest(query_of(idx), cur, l);

        for (int l = std::min(level, max_level_); l >= 0; --l) {
            auto cands = search_layer(query_of(idx), cur, l, params_.ef_construction);
            const int max_links = l == 0 ? 2 * params_.M : params_.M;
            auto selected = select_best(cands, params_.M);
            for (int nb : selected) {
                link(node, nb, l, max_links);
                link(nb, node, l, max_links);
            }
            if (!selected.empty()) cur = selected.front();
        }
        if (level > max_level_) {
            max_level_ = level;
            entry_ = node;
        }
    }

    std::vector<int> search(const Vector& q, int k, int ef) const {
        if (nodes_.empty()) return {};
        int cur = entry_;
        for (int l = max_level_; l > 0; --l) cur = greedy_closest(q, cur, l);
        auto cands = search_layer(q, cur, 0, std::max(ef, k));
        auto selected = select_best(cands, k);
        std::vector<int> out;
        out.reserve(selected.size());
        for (int n : selected) out.push_back(nodes_[n].vector_index);
        return out;
    }

  private:
    struct Node {
        int vector_index;
        int level;
        std::vector<std::vector<int>> neighbors;  // per layer
    };

    const Vector& query_of(int vector_index) const { return (*vectors_)[vector_index]; }

    float sim(const Vector& q, int node) const {
        return embed::dot(q, (*vectors_)[nodes_[node].vector_index]);
    }

    int random_level() {
        std::uniform_real_distribution<double> unit(std::nextafter(0.0, 1.0), 1.0);
        return static_cast<int>(-std::log(unit(rng_)) * level_scale_);
    }

    int greedy_closest(const Vector& q, int start, int layer) const {
        int cur = start;
        float best = sim(q, cur);
        bool improved = true;
        while (improved) {
            improved = false;
            for (int nb : nodes_[cur].neighbors[layer]) {
                const float s = sim(q, nb);
                if (s > best) {
                    best = s;
                    cur = nb;
                    improved = true;
                }
            }
        }
        return cur;
    }

    // Best-first expansion keeping ef candidates; returns (sim, node) pairs.
    std::vector<std::pair<float, int>> search_layer(const Vector& q, int start, int layer,
                                                    int ef) const {
        std::unordered_set<int> visited{start};
        // max-heap of frontier by similarity; min-heap of results.
        std::priority_queue<std::pair<float, int>> frontier;
        std::priority_queue<std::pair<float, int>, std::vector<std::pair<float, int>>,
                            std::greater<>>
            results;
        const float s0 = sim(q, start);
        frontier.emplace(s0, start);
        results.emplace(s0, start);
        while (!frontier.empty()) {
            auto [s, node] = frontier.top();
            frontier.pop();
            if (static_cast<int>(results.size()) >= ef && s < results.top().first) break;
            for (int nb : nodes_[node].neighbors[layer]) {
                if (!visited.insert(nb).second) continue;
                const float sn = sim(q, nb);
                if (static_cast<int>(results.size()) < ef || sn > results.top().first) {
                    frontier.emplace(sn, nb);
                    results.emplace(sn, nb);
                    if (static_cast<int>(results.size()) > ef) results.pop();
                }
            }
        }
        std::vector<std::pair<float, int>> out;
        out.reserve(results.size());
        while (!results.empty()) {
            out.push_back(results.top());
            results.pop();
        }
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        return out;
    }

    static std::vector<int> select_best(const std::vector<std::pair<float, int>>& cands, int m) {
        std::vector<int> out;
        for (const auto& [s, n] : cands) {
            (void)s;
            out.push_back(n);
            if (static_cast<int>(out.size()) >= m) break;
        }
        return out;
    }

    void link(int from, int to, int layer, int max_links) {
        if (from == to) return;
        auto& nbs = nodes_[from].neighbors[layer];
        if (std::find(nbs.begin(), nbs.end(), to) != nbs.end()) return;
        nbs.push_back(to);
        if (static_cast<int>(nbs.size()) > max_links) {
            const Vector& q = query_of(nodes_[from].vector_index);
            auto worst = std::min_element(nbs.begin(), nbs.end(), [&](int a, int b) {
                return sim(q, a) < sim(q, b);
            });
            nbs.erase(worst);
        }
    }

    const std::vector<Vector>* vectors_;
    HnswParams params_;
    double level_scale_;
    std::mt19937_64 rng_;
    std::vector<Node> nodes_;
    int entry_ = -1;
    int max_level_ = -1;
};

}  // namespace detail

VectorIndex::VectorIndex(int dimension, IndexMode mode, HnswParams params)
    : dimension_(dimension), mode_(mode), params_(params) {
    if (dimension <= 0) throw std::invalid_argument("index dimension must be positive");
    if (mode_ == IndexMode::hnsw) {
        graph_ = std::make_unique<detail::HnswGraph>(&vectors_, params_);
    }
}

VectorIndex::~VectorIndex() = default;

void VectorIndex::add(const std::string& id, Vector v) {
    if (static_cast<int>(v.size()) != dimension_) {
        throw std::invalid_argument("vector dimension mismatch for id " + id);
    }
    ids_.push_back(id);
    vectors_.push_back(std::move(v));
    if (graph_) graph_->insert(static_cast<int>(vectors_.size()) - 1);
}

namespace {

std::vector<SearchHit> top_k_from_scores(const std::vector<std::string>& ids,
                                         const std::vector<float>& scores, int k) {
    std::vector<int> order(ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    const auto cmp = [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return ids[a] < ids[b];
    };
    const auto take = static_cast<std::ptrdiff_t>(std::min<std::size_t>(k, order.size()));
    std::partial_sort(order.begin(), order.begin() + take, order.end(), cmp);
    std::vector<SearchHit> out;
    out.reserve(static_cast<std::size_t>(take));
    for (std::ptrdiff_t i = 0; i < take; ++i) out.push_back({ids[order[i]], scores[order[i]]});
    return out;
}

}  // namespace

std::vector<SearchHit> VectorIndex::knn_exact_serial(const Vector& query, int k) const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::vector<float> scores(vectors_.size());
    for (std::size_t i = 0; i < vectors_.size(); ++i) scores[i] = embed::dot(query, vectors_[i]);
    return top_k_from_scores(ids_, scores, k);
}

std::vector<SearchHit> VectorIndex::knn_exact_parallel(const Vector& query, int k) const {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::vector<float> scores(vectors_.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(vectors_.size()); ++i) {
        scores[i] = embed::dot(query, vectors_[i]);
    }
    return top_k_from_scores(ids_, scores, k);
}

std::vector<SearchHit> VectorIndex::knn_hnsw(const Vector& query, int k) const {
    auto nodes = graph_->search(query, k, params_.ef_search);
    std::vector<SearchHit> out;
    out.reserve(nodes.size());
    for (int i : nodes) out.push_back({ids_[i], embed::dot(query, vectors_[i])});
    return out;
}

std::vector<SearchHit> VectorIndex::knn(const Vector& query, int k) const {
    if (static_cast<int>(query.size()) != dimension_) {
        throw std::invalid_argument("query dimension mismatch");
    }
    if (ids_.empty()) return {};
    return mode_ == IndexMode::exact ? knn_exact_parallel(query, k) : knn_hnsw(query, k);
}

}  // namespace classim::index
