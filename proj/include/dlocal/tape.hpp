#pragma once

#include "dlocal/errors.hpp"
#include "dlocal/rng.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dlocal
{
    inline constexpr std::int8_t kUnfixed = -1;

    /// Per-node private bit strings, each cell 0, 1 or unfixed. A complete assignment is a
    /// realized random tape; partial ones are what the derandomizer works with.
    class TapeAssignment
    {
    public:
        TapeAssignment() = default;

        explicit TapeAssignment(std::span<const int> layout)
        {
            cells_.reserve(layout.size());
            for (int b : layout)
            {
                if (b < 0)
                    throw PreconditionError("tape layout: negative bit count");
                cells_.emplace_back(static_cast<std::size_t>(b), kUnfixed);
            }
        }

        /// Node v's bits come from its own stream, so they are a pure function of (seed, v).
        static TapeAssignment random(std::span<const int> layout, std::uint64_t seed)
        {
            TapeAssignment t(layout);
            for (std::size_t v = 0; v < layout.size(); ++v)
            {
                Rng rng(stream_seed(seed, v, 0x7a9e));
                std::uint64_t word = 0;
                for (int j = 0; j < layout[v]; ++j)
                {
                    if (j % 64 == 0)
                        word = rng();
                    t.cells_[v][static_cast<std::size_t>(j)] = static_cast<std::int8_t>((word >> (63 - j % 64)) & 1U);
                }
            }
            return t;
        }

        int nodes() const noexcept { return static_cast<int>(cells_.size()); }
        int bits(int v) const { return static_cast<int>(cells_[static_cast<std::size_t>(v)].size()); }
        std::int8_t get(int v, int j) const { return cells_[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)]; }
        bool is_fixed(int v, int j) const { return get(v, j) != kUnfixed; }

        std::vector<int> layout() const
        {
            std::vector<int> out;
            out.reserve(cells_.size());
            for (const auto& c : cells_)
                out.push_back(static_cast<int>(c.size()));
            return out;
        }

        /// Monotone fixing: an unfixed cell may become 0/1; a fixed cell may only be re-set to itself.
        void fix(int v, int j, int value)
        {
            auto& c = cells_[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
            const auto nv = static_cast<std::int8_t>(value != 0);
            if (c != kUnfixed && c != nv)
                throw ContractViolation("tape bit (" + std::to_string(v) + "," + std::to_string(j) + ") already fixed");
            c = nv;
        }

        /// Unchecked write (used for perturbation experiments and resampling).
        void set(int v, int j, std::int8_t value) { cells_[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)] = value; }

        void clear_node(int v)
        {
            for (auto& c : cells_[static_cast<std::size_t>(v)])
                c = kUnfixed;
        }

        int unfixed_count(int v) const
        {
            int k = 0;
            for (auto c : cells_[static_cast<std::size_t>(v)])
                k += (c == kUnfixed);
            return k;
        }

        bool complete() const noexcept
        {
            for (const auto& node : cells_)
                for (auto c : node)
                    if (c == kUnfixed)
                        return false;
            return true;
        }

        /// Tape of v read as an integer, bit 0 most significant. Requires all bits fixed.
        std::uint64_t value(int v) const
        {
            std::uint64_t x = 0;
            for (auto c : cells_[static_cast<std::size_t>(v)])
            {
                if (c == kUnfixed)
                    throw PreconditionError("tape value: node has unfixed bits");
                x = (x << 1) | static_cast<std::uint64_t>(c);
            }
            return x;
        }

        std::string bit_string(int v) const
        {
            std::string s;
            for (auto c : cells_[static_cast<std::size_t>(v)])
                s.push_back(c == kUnfixed ? '*' : static_cast<char>('0' + c));
            return s;
        }

        friend bool operator==(const TapeAssignment&, const TapeAssignment&) = default;

    private:
        std::vector<std::vector<std::int8_t>> cells_;
    };

    inline std::vector<int> uniform_layout(int n, int bits) { return std::vector<int>(static_cast<std::size_t>(n), bits); }

} // namespace dlocal
