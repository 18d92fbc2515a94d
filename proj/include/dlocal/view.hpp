#pragma once

#include "dlocal/graph.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace dlocal
{
    /// The r-hop ball around a center: sorted member list with aligned hop distances.
    class Ball
    {
    public:
        Ball() = default;

        Ball(const Graph& g, int center, int radius) : center_(center), radius_(radius)
        {
            thread_local std::vector<int> mark;
            if (mark.size() < static_cast<std::size_t>(g.n()))
                mark.assign(static_cast<std::size_t>(g.n()), kUnreached);
            std::vector<int> order{center};
            std::vector<int> d{0};
            mark[static_cast<std::size_t>(center)] = 0;
            for (std::size_t head = 0; head < order.size(); ++head)
            {
                const int u = order[head];
                const int du = d[head];
                if (radius >= 0 && du >= radius)
                    continue;
                for (int w : g.neighbors(u))
                    if (mark[static_cast<std::size_t>(w)] == kUnreached)
                    {
                        mark[static_cast<std::size_t>(w)] = du + 1;
                        order.push_back(w);
                        d.push_back(du + 1);
                    }
            }
            for (int u : order)
                mark[static_cast<std::size_t>(u)] = kUnreached;
            std::vector<std::size_t> idx(order.size());
            for (std::size_t i = 0; i < idx.size(); ++i)
                idx[i] = i;
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return order[a] < order[b]; });
            nodes_.reserve(order.size());
            dist_.reserve(order.size());
            for (auto i : idx)
            {
                nodes_.push_back(order[i]);
                dist_.push_back(d[i]);
            }
        }

        int center() const noexcept { return center_; }
        int radius() const noexcept { return radius_; }
        std::span<const int> nodes() const noexcept { return nodes_; }
        std::size_t size() const noexcept { return nodes_.size(); }

        /// Hop distance from the center, or kUnreached outside the ball.
        int dist(int u) const
        {
            const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), u);
            if (it == nodes_.end() || *it != u)
                return kUnreached;
            return dist_[static_cast<std::size_t>(it - nodes_.begin())];
        }

        bool contains(int u) const { return std::binary_search(nodes_.begin(), nodes_.end(), u); }

    private:
        int center_ = 0;
        int radius_ = 0;
        std::vector<int> nodes_;
        std::vector<int> dist_;
    };

    /// Access to graph structure restricted to a ball. Reading anything about a node
    /// outside the ball raises ContractViolation.
    class BallView
    {
    public:
        BallView(const Graph& g, const Ball& ball) : g_(&g), ball_(&ball) {}

        int center() const noexcept { return ball_->center(); }
        int radius() const noexcept { return ball_->radius(); }
        const Ball& ball() const noexcept { return *ball_; }
        std::span<const int> nodes() const noexcept { return ball_->nodes(); }
        bool contains(int u) const { return ball_->contains(u); }
        int dist(int u) const { return ball_->dist(u); }
        int network_size() const noexcept { return g_->n(); }

        std::span<const int> neighbors(int u) const
        {
            require(u);
            return g_->neighbors(u);
        }
        int degree(int u) const
        {
            require(u);
            return g_->degree(u);
        }
        NodeId id(int u) const
        {
            require(u);
            return g_->id(u);
        }

    protected:
        void require(int u) const
        {
            if (!ball_->contains(u))
                throw ContractViolation("view of node " + std::to_string(center()) + " (radius " +
                                        std::to_string(radius()) + ") read node " + std::to_string(u));
        }

        const Graph* g_;
        const Ball* ball_;
    };

} // namespace dlocal
