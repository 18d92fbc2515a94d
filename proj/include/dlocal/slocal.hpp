#pragma once

#include "dlocal/view.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dlocal
{
    /// What an SLOCAL step at the center may read: structure, IDs and inputs inside its
    /// ball, plus the records stored by already-processed nodes of the ball.
    template <class In, class Rec>
    class SlocalView
    {
    public:
        virtual ~SlocalView() = default;

        virtual int center() const = 0;
        virtual int radius() const = 0;
        virtual int dist(int u) const = 0; // kUnreached outside the view
        virtual std::span<const int> neighbors(int u) const = 0;
        virtual NodeId id(int u) const = 0;
        virtual const In& input(int u) const = 0;
        /// Stored record of u, or nullptr if u has not been processed yet.
        virtual const Rec* record(int u) const = 0;

        bool contains(int u) const { return dist(u) != kUnreached; }
        int degree(int u) const { return static_cast<int>(neighbors(u).size()); }

        /// Nodes of the view within `r` hops of `from`, found by BFS through the view.
        std::vector<std::pair<int, int>> nearby(int from, int r) const
        {
            std::vector<std::pair<int, int>> out{{from, 0}};
            std::set<int> seen{from};
            for (std::size_t head = 0; head < out.size(); ++head)
            {
                const auto [u, du] = out[head];
                if (du >= r)
                    continue;
                for (int w : neighbors(u))
                    if (seen.insert(w).second)
                        out.emplace_back(w, du + 1);
            }
            return out;
        }
    };

    template <class In, class Rec>
    class SlocalAlgorithm
    {
    public:
        using input_type = In;
        using record_type = Rec;

        virtual ~SlocalAlgorithm() = default;
        virtual std::string name() const = 0;
        virtual int locality() const = 0;
        virtual Rec step(const SlocalView<In, Rec>& view) const = 0;
    };

    namespace detail
    {
        template <class In, class Rec>
        class RunView final : public SlocalView<In, Rec>
        {
        public:
            RunView(const Graph& g, const Ball& b, std::span<const In> inputs, const std::vector<std::optional<Rec>>& recs)
                : g_(g), b_(b), inputs_(inputs), recs_(recs)
            {
            }
            int center() const override { return b_.center(); }
            int radius() const override { return b_.radius(); }
            int dist(int u) const override { return b_.dist(u); }
            std::span<const int> neighbors(int u) const override
            {
                require(u);
                return g_.neighbors(u);
            }
            NodeId id(int u) const override
            {
                require(u);
                return g_.id(u);
            }
            const In& input(int u) const override
            {
                require(u);
                return inputs_[static_cast<std::size_t>(u)];
            }
            const Rec* record(int u) const override
            {
                require(u);
                const auto& r = recs_[static_cast<std::size_t>(u)];
                return r ? &*r : nullptr;
            }

        private:
            void require(int u) const
            {
                if (!b_.contains(u))
                    throw ContractViolation("SLOCAL step at " + std::to_string(b_.center()) + " (locality " +
                                            std::to_string(b_.radius()) + ") read node " + std::to_string(u));
            }
            const Graph& g_;
            const Ball& b_;
            std::span<const In> inputs_;
            const std::vector<std::optional<Rec>>& recs_;
        };
    } // namespace detail

    inline void require_permutation(std::span<const int> order, int n)
    {
        if (order.size() != static_cast<std::size_t>(n))
            throw PreconditionError("order must list every node exactly once");
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        for (int v : order)
        {
            if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)])
                throw PreconditionError("order is not a permutation of the nodes");
            seen[static_cast<std::size_t>(v)] = 1;
        }
    }

    /// Processes nodes in `order`; returns the record (= output) of every node.
    template <class In, class Rec>
    std::vector<Rec> run_slocal(const SlocalAlgorithm<In, Rec>& a, const Graph& g, std::span<const In> inputs,
                                std::span<const int> order)
    {
        require_permutation(order, g.n());
        std::vector<std::optional<Rec>> recs(static_cast<std::size_t>(g.n()));
        for (int v : order)
        {
            const Ball b(g, v, a.locality());
            recs[static_cast<std::size_t>(v)] = a.step(detail::RunView<In, Rec>(g, b, inputs, recs));
        }
        std::vector<Rec> out;
        out.reserve(recs.size());
        for (auto& r : recs)
            out.push_back(std::move(*r));
        return out;
    }

    template <class In, class Rec>
    std::vector<Rec> run_slocal(const SlocalAlgorithm<In, Rec>& a, const Graph& g, const std::vector<In>& inputs,
                                const std::vector<int>& order)
    {
        return run_slocal(a, g, std::span<const In>(inputs), std::span<const int>(order));
    }

    inline std::vector<int> identity_order(int n)
    {
        std::vector<int> o(static_cast<std::size_t>(n));
        std::iota(o.begin(), o.end(), 0);
        return o;
    }

    /// Record of the single-pass composition: the first-stage records this node computed on
    /// behalf of not-yet-covered nodes near it, and its own second-stage record.
    template <class R1, class R2>
    struct ComposedRecord
    {
        std::vector<std::pair<int, R1>> first_stage;
        R2 second{};
    };

    /// A1 then A2 as one SLOCAL pass of locality r1 + 2*r2. A2 reads (input, A1 record) pairs.
    template <class In, class R1, class R2>
    class ComposedSlocal final : public SlocalAlgorithm<In, ComposedRecord<R1, R2>>
    {
    public:
        using Pair = std::pair<In, R1>;
        using Rec = ComposedRecord<R1, R2>;

        ComposedSlocal(const SlocalAlgorithm<In, R1>& a1, const SlocalAlgorithm<Pair, R2>& a2) : a1_(a1), a2_(a2) {}

        std::string name() const override { return a1_.name() + "+" + a2_.name(); }
        int locality() const override { return a1_.locality() + 2 * a2_.locality(); }

        Rec step(const SlocalView<In, Rec>& view) const override
        {
            const int v = view.center();
            const int r1 = a1_.locality();
            const int r2 = a2_.locality();
            std::map<int, R1> fresh;

            auto lookup = [&](int u) -> const R1* {
                if (auto it = fresh.find(u); it != fresh.end())
                    return &it->second;
                // Whoever computed u's first-stage record is within r2 of u.
                for (const auto& [w, dw] : view.nearby(u, r2))
                {
                    (void)dw;
                    if (const Rec* rec = view.record(w))
                        for (const auto& [x, r] : rec->first_stage)
                            if (x == u)
                                return &r;
                }
                return nullptr;
            };

            std::vector<int> pending;
            for (const auto& [u, du] : view.nearby(v, r2))
            {
                (void)du;
                if (lookup(u) == nullptr)
                    pending.push_back(u);
            }
            std::sort(pending.begin(), pending.end(), [&](int a, int b) { return view.id(a) < view.id(b); });

            Rec out;
            for (int u : pending)
            {
                const FirstView fv(view, u, r1, lookup);
                R1 r = a1_.step(fv);
                fresh.emplace(u, r);
                out.first_stage.emplace_back(u, std::move(r));
            }
            const SecondView sv(view, v, r2, lookup);
            out.second = a2_.step(sv);
            return out;
        }

    private:
        using Lookup = std::function<const R1*(int)>;

        class SubView
        {
        protected:
            SubView(const SlocalView<In, Rec>& parent, int center, int radius) : parent_(parent), center_(center), radius_(radius)
            {
                for (const auto& [u, d] : parent.nearby(center, radius))
                    dist_.emplace(u, d);
            }
            int sub_dist(int u) const
            {
                auto it = dist_.find(u);
                return it == dist_.end() ? kUnreached : it->second;
            }
            void require(int u) const
            {
                if (sub_dist(u) == kUnreached)
                    throw ContractViolation("composed stage at " + std::to_string(center_) + " read node " + std::to_string(u));
            }
            const SlocalView<In, Rec>& parent_;
            int center_;
            int radius_;
            std::map<int, int> dist_;
        };

        class FirstView final : public SlocalView<In, R1>, SubView
        {
        public:
            FirstView(const SlocalView<In, Rec>& p, int c, int r, Lookup lookup) : SubView(p, c, r), lookup_(std::move(lookup)) {}
            int center() const override { return this->center_; }
            int radius() const override { return this->radius_; }
            int dist(int u) const override { return this->sub_dist(u); }
            std::span<const int> neighbors(int u) const override
            {
                this->require(u);
                return this->parent_.neighbors(u);
            }
            NodeId id(int u) const override
            {
                this->require(u);
                return this->parent_.id(u);
            }
            const In& input(int u) const override
            {
                this->require(u);
                return this->parent_.input(u);
            }
            const R1* record(int u) const override
            {
                this->require(u);
                return lookup_(u);
            }

        private:
            Lookup lookup_;
        };

        class SecondView final : public SlocalView<Pair, R2>, SubView
        {
        public:
            SecondView(const SlocalView<In, Rec>& p, int c, int r, Lookup lookup) : SubView(p, c, r), lookup_(std::move(lookup)) {}
            int center() const override { return this->center_; }
            int radius() const override { return this->radius_; }
            int dist(int u) const override { return this->sub_dist(u); }
            std::span<const int> neighbors(int u) const override
            {
                this->require(u);
                return this->parent_.neighbors(u);
            }
            NodeId id(int u) const override
            {
                this->require(u);
                return this->parent_.id(u);
            }
            const Pair& input(int u) const override
            {
                this->require(u);
                auto it = pairs_.find(u);
                if (it == pairs_.end())
                {
                    const R1* r = lookup_(u);
                    if (r == nullptr)
                        throw ContractViolation("composed second stage: first-stage record missing for node " + std::to_string(u));
                    it = pairs_.emplace(u, Pair(this->parent_.input(u), *r)).first;
                }
                return it->second;
            }
            const R2* record(int u) const override
            {
                this->require(u);
                const Rec* r = this->parent_.record(u);
                return r ? &r->second : nullptr;
            }

        private:
            Lookup lookup_;
            mutable std::map<int, Pair> pairs_;
        };

        const SlocalAlgorithm<In, R1>& a1_;
        const SlocalAlgorithm<Pair, R2>& a2_;
    };

    template <class In, class R1, class R2>
    ComposedSlocal<In, R1, R2> compose_slocal(const SlocalAlgorithm<In, R1>& a1,
                                              const SlocalAlgorithm<std::pair<In, R1>, R2>& a2)
    {
        return ComposedSlocal<In, R1, R2>(a1, a2);
    }

    /// Order in which a composed run executed its first stage (concatenated per step).
    template <class R1, class R2>
    std::vector<int> first_stage_order(const std::vector<ComposedRecord<R1, R2>>& recs, std::span<const int> order)
    {
        std::vector<int> out;
        for (int v : order)
            for (const auto& [u, r] : recs[static_cast<std::size_t>(v)].first_stage)
            {
                (void)r;
                out.push_back(u);
            }
        return out;
    }

    /// First-stage record of every node, gathered from whichever node computed it.
    template <class R1, class R2>
    std::vector<R1> first_stage_records(const std::vector<ComposedRecord<R1, R2>>& recs)
    {
        std::vector<std::optional<R1>> tmp(recs.size());
        for (const auto& rec : recs)
            for (const auto& [u, r] : rec.first_stage)
                tmp[static_cast<std::size_t>(u)] = r;
        std::vector<R1> out;
        for (auto& t : tmp)
            out.push_back(std::move(*t));
        return out;
    }

} // namespace dlocal
