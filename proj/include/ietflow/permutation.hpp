#pragma once

#include <string>
#include <vector>

namespace ietflow {

/*
 * Permutation of {0..d-1}. pi(k) is the slot occupied by the image of the
 * k-th interval. External text and JSON use 1-based images.
 */
class Permutation {
public:
    Permutation() = default;
    /// Throws InvalidInput unless `images` is a bijection of {0..d-1}.
    explicit Permutation(std::vector<int> images);
    static Permutation from_one_based(const std::vector<int>& images);
    static Permutation identity(int d);
    /// The reversal (d d-1 ... 1).
    static Permutation reversal(int d);

    int size() const noexcept { return static_cast<int>(img_.size()); }
    int operator()(int k) const { return img_[static_cast<std::size_t>(k)]; }
    const std::vector<int>& images() const noexcept { return img_; }
    std::vector<int> one_based() const;
    Permutation inverse() const;
    /// "(3 1 2)".
    std::string str() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;
    friend auto operator<=>(const Permutation&, const Permutation&) = default;

private:
    std::vector<int> img_;
};

/// False iff some proper prefix {0..k}, k < d-1, is mapped onto itself.
bool is_irreducible(const Permutation& pi);

}  // namespace ietflow
