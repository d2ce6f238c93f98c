#include "classim/embed.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace classim::embed {

namespace {

std::uint64_t fnv1a(const std::string& token) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : token) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

Vector hashed_bag_embedding(const std::string& text, int dimension) {
    if (dimension <= 0) throw std::invalid_argument("embedding dimension must be positive");
    Vector v(dimension, 0.0f);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        const std::uint64_t h = fnv1a(token);
        const int bucket = static_cast<int>(h % static_cast<std::uint64_t>(dimension));
        v[bucket] += ((h >> 32) & 1) ? 1.0f : -1.0f;  // signed hashing spreads mass
        token.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    if (l2_norm(v) == 0.0f) v[0] = 1.0f;  // empty or all-cancelled text
    l2_normalize(v);
    return v;
}

float dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector dimension mismatch");
    float s = 0.0f;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

float l2_norm(const Vector& v) {
    double s = 0.0;
    for (float x : v) s += static_cast<double>(x) * x;
    return static_cast<float>(std::sqrt(s));
}

void l2_normalize(Vector& v) {
    const float n = l2_norm(v);
    if (n == 0.0f) throw std::invalid_argument("cannot normalize the zero vector");
    for (float& x : v) x /= n;
}

}  // namespace classim::embed
