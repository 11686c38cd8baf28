#include "ietflow/permutation.hpp"

#include <algorithm>

#include "ietflow/errors.hpp"

namespace ietflow {

Permutation::Permutation(std::vector<int> images) : img_(std::move(images)) {
    const int d = size();
    if (d < 1) throw InvalidInput("empty permutation");
    std::vector<char> seen(static_cast<std::size_t>(d), 0);
    for (int v : img_) {
        if (v < 0 || v >= d || seen[static_cast<std::size_t>(v)]) {
            throw InvalidInput("not a bijection: " + str());
        }
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

Permutation Permutation::from_one_based(const std::vector<int>& images) {
    std::vector<int> z(images);
    for (int& v : z) --v;
    return Permutation(std::move(z));
}

Permutation Permutation::identity(int d) {
    std::vector<int> z(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = i;
    return Permutation(std::move(z));
}

Permutation Permutation::reversal(int d) {
    std::vector<int> z(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = d - 1 - i;
    return Permutation(std::move(z));
}

std::vector<int> Permutation::one_based() const {
    std::vector<int> out(img_);
    for (int& v : out) ++v;
    return out;
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(img_.size());
    for (std::size_t k = 0; k < img_.size(); ++k) inv[static_cast<std::size_t>(img_[k])] = static_cast<int>(k);
    return Permutation(std::move(inv));
}

std::string Permutation::str() const {
    std::string s = "(";
    for (std::size_t k = 0; k < img_.size(); ++k) {
        if (k) s += ' ';
        s += std::to_string(img_[k] + 1);
    }
    return s + ")";
}

bool is_irreducible(const Permutation& pi) {
    const int d = pi.size();
    int mx = -1;
    for (int k = 0; k + 1 < d; ++k) {
        mx = std::max(mx, pi(k));
        if (mx == k) return false;
    }
    return true;
}

}  // namespace ietflow
