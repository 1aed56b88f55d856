#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace knotlab {

struct Seed {
    std::uint64_t master = 0;
    std::uint64_t shard = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Counter-based stream: the key mixes the master seed with the shard index,
// the upper counter words carry the shard index and the lower ones count blocks.
class RandomStream {
public:
    explicit RandomStream(Seed seed);
    RandomStream(std::uint64_t master, std::uint64_t shard) : RandomStream(Seed{master, shard}) {}

    std::uint32_t next_u32();
    std::uint64_t next_u64();
    double uniform01();                       // [0, 1), 53 bits
    std::uint64_t below(std::uint64_t n);     // unbiased in [0, n)
    int coin() { return (next_u32() & 1u) ? 1 : -1; }
    double normal();

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    void refill();

    std::array<std::uint32_t, 2> key_{};
    std::uint64_t block_ = 0;
    std::uint64_t shard_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int avail_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace knotlab
