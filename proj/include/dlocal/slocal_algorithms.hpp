#pragma once

#include "dlocal/local.hpp"
#include "dlocal/slocal.hpp"

#include <set>

namespace dlocal
{
    /// Greedy (deg+1)-coloring with locality 1: smallest color at least `base` not used by
    /// an already-processed neighbor.
    template <class In = NoInput>
    class GreedyColoringSlocal final : public SlocalAlgorithm<In, int>
    {
    public:
        explicit GreedyColoringSlocal(int base = 0) : base_(base) {}
        std::string name() const override { return "greedy-coloring"; }
        int locality() const override { return 1; }
        int step(const SlocalView<In, int>& view) const override
        {
            std::set<int> used;
            for (int w : view.neighbors(view.center()))
                if (const int* c = view.record(w))
                    used.insert(*c);
            int c = base_;
            while (used.count(c))
                ++c;
            return c;
        }

    private:
        int base_;
    };

    /// Greedy MIS with locality 1: join unless an already-processed neighbor joined.
    template <class In = NoInput>
    class GreedyMisSlocal final : public SlocalAlgorithm<In, char>
    {
    public:
        std::string name() const override { return "greedy-mis"; }
        int locality() const override { return 1; }
        char step(const SlocalView<In, char>& view) const override
        {
            for (int w : view.neighbors(view.center()))
                if (const char* j = view.record(w); j && *j)
                    return 0;
            return 1;
        }
    };

    inline bool is_proper_coloring(const Graph& g, std::span<const int> color)
    {
        for (const auto& [u, v] : g.edges())
            if (color[static_cast<std::size_t>(u)] == color[static_cast<std::size_t>(v)])
                return false;
        return true;
    }

    inline bool is_maximal_independent_set(const Graph& g, std::span<const char> in)
    {
        for (int v = 0; v < g.n(); ++v)
        {
            bool blocked = false;
            for (int w : g.neighbors(v))
            {
                if (in[static_cast<std::size_t>(v)] && in[static_cast<std::size_t>(w)])
                    return false;
                blocked |= in[static_cast<std::size_t>(w)] != 0;
            }
            if (!in[static_cast<std::size_t>(v)] && !blocked)
                return false;
        }
        return true;
    }

} // namespace dlocal
