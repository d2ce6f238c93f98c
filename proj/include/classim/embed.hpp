#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace classim::embed {

using Vector = std::vector<float>;

// Order-independent bag-of-hashed-tokens embedding, L2-normalized.
// Deterministic; used by the offline mock provider.
Vector hashed_bag_embedding(const std::string& text, int dimension);

float dot(const Vector& a, const Vector& b);
void l2_normalize(Vector& v);
float l2_norm(const Vector& v);

class Embedder {
  public:
    virtual ~Embedder() = default;
    virtual Vector embed(const std::string& text) = 0;
    virtual int dimension() const = 0;
};

class MockEmbedder final : public Embedder {
  public:
    explicit MockEmbedder(int dimension = 256) : dimension_(dimension) {}
    Vector embed(const std::string& text) override {
        return hashed_bag_embedding(text, dimension_);
    }
    int dimension() const override { return dimension_; }

  private:
    int dimension_;
};

}  // namespace classim::embed
