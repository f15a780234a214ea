#include "parmc/oracle.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>

namespace parmc {

namespace {

std::vector<bool> eval_pred_all(const ExplicitModel& m, const AtomExpr& e) {
    CompiledPred pred(e, m.props);
    LabelBits bits;
    bits.resize_for(m.props.size());
    std::vector<bool> out(m.state_count());
    for (std::size_t s = 0; s < m.state_count(); ++s) {
        bits.clear();
        for (std::uint32_t p : m.labels[s]) bits.set(p);
        out[s] = pred.eval(bits.words());
    }
    return out;
}

// Least fixpoint of E(psi U phi): phi-states, then psi-states with some
// labeled successor.
std::vector<bool> label_eu(const ExplicitModel& m, const std::vector<bool>& psi,
                           const std::vector<bool>& phi) {
    std::vector<bool> labeled = phi;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t s = 0; s < m.state_count(); ++s) {
            if (labeled[s] || !psi[s]) continue;
            for (std::uint32_t d : m.edges[s]) {
                if (labeled[d]) {
                    labeled[s] = true;
                    changed = true;
                    break;
                }
            }
        }
    }
    return labeled;
}

// Least fixpoint of A(psi U phi) under the dead-state convention: phi-states,
// then psi-states with at least one successor and all successors labeled.
std::vector<bool> label_au(const ExplicitModel& m, const std::vector<bool>& psi,
                           const std::vector<bool>& phi) {
    std::vector<bool> labeled = phi;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t s = 0; s < m.state_count(); ++s) {
            if (labeled[s] || !psi[s]) continue;
            if (m.edges[s].empty()) continue;
            bool all = true;
            for (std::uint32_t d : m.edges[s])
                if (!labeled[d]) {
                    all = false;
                    break;
                }
            if (all) {
                labeled[s] = true;
                changed = true;
            }
        }
    }
    return labeled;
}

std::vector<bool> reachable_from_init(const ExplicitModel& m) {
    std::vector<bool> seen(m.state_count(), false);
    std::deque<std::uint32_t> queue;
    seen[m.init] = true;
    queue.push_back(static_cast<std::uint32_t>(m.init));
    while (!queue.empty()) {
        std::uint32_t s = queue.front();
        queue.pop_front();
        for (std::uint32_t d : m.edges[s]) {
            if (!seen[d]) {
                seen[d] = true;
                queue.push_back(d);
            }
        }
    }
    return seen;
}

}   // namespace

bool oracle_check_task(const ExplicitModel& m, const CheckTask& t) {
    if (m.state_count() > 1000000) throw ModelError("oracle size cap exceeded");
    std::vector<bool> psi = eval_pred_all(m, t.psi);
    std::vector<bool> phi = eval_pred_all(m, t.phi);
    bool raw = false;
    switch (t.kind) {
        case TaskKind::EU: raw = label_eu(m, psi, phi)[m.init]; break;
        case TaskKind::AU: raw = label_au(m, psi, phi)[m.init]; break;
        case TaskKind::Leadsto: {
            // psi ~> phi: every reachable psi-state satisfies A<>(phi).
            std::vector<bool> all_true(m.state_count(), true);
            std::vector<bool> af = label_au(m, all_true, phi);
            std::vector<bool> reach = reachable_from_init(m);
            raw = true;
            for (std::size_t s = 0; s < m.state_count(); ++s) {
                if (reach[s] && psi[s] && !af[s]) {
                    raw = false;
                    break;
                }
            }
            break;
        }
    }
    return t.negate_result ? !raw : raw;
}

bool oracle_check(const ExplicitModel& m, const Formula& f) {
    return oracle_check_task(m, normalize(f));
}

ExplicitModel random_model(std::uint64_t seed, std::size_t n_states, unsigned max_out_degree,
                           unsigned n_props, double p_label) {
    std::mt19937_64 rng(seed);
    ExplicitModel m;
    m.init = 0;
    for (unsigned p = 0; p < n_props; ++p) m.props.push_back("p" + std::to_string(p));
    m.edges.resize(n_states);
    m.labels.resize(n_states);
    std::uniform_int_distribution<unsigned> deg_dist(0, max_out_degree);
    std::uniform_int_distribution<std::uint32_t> target_dist(
        0, static_cast<std::uint32_t>(n_states - 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t s = 0; s < n_states; ++s) {
        unsigned deg = deg_dist(rng);
        auto& out = m.edges[s];
        for (unsigned k = 0; k < deg; ++k) {
            std::uint32_t d = target_dist(rng);
            if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
        }
        for (unsigned p = 0; p < n_props; ++p)
            if (unit(rng) < p_label) m.labels[s].push_back(p);
    }
    return m;
}

ExplicitModel enumerate_model(const Model& model, std::size_t max_states) {
    ExplicitModel m;
    m.props = model.propositions();
    std::map<StateVector, std::uint32_t> index;
    std::vector<StateVector> order;
    std::deque<std::uint32_t> queue;

    auto add = [&](const StateVector& v) {
        auto it = index.find(v);
        if (it != index.end()) return it->second;
        if (order.size() >= max_states)
            throw ModelError("enumeration exceeds " + std::to_string(max_states) + " states");
        std::uint32_t id = static_cast<std::uint32_t>(order.size());
        index.emplace(v, id);
        order.push_back(v);
        queue.push_back(id);
        return id;
    };

    add(model.initial());
    m.init = 0;
    std::vector<StateVector> succs;
    LabelBits bits;
    bits.resize_for(m.props.size());
    std::vector<std::vector<std::uint32_t>> adj, lab;
    while (!queue.empty()) {
        std::uint32_t s = queue.front();
        queue.pop_front();
        StateVector vec = order[s];   // copy: order may grow below
        model.successors(vec, succs);
        std::vector<std::uint32_t> out;
        for (const StateVector& v : succs) out.push_back(add(v));
        if (adj.size() < order.size()) {
            adj.resize(order.size());
            lab.resize(order.size());
        }
        adj[s] = std::move(out);
        model.labeling(vec, bits);
        std::vector<std::uint32_t> lp;
        for (std::uint32_t p = 0; p < m.props.size(); ++p)
            if (bits.test(p)) lp.push_back(p);
        lab[s] = std::move(lp);
    }
    adj.resize(order.size());
    lab.resize(order.size());
    m.edges = std::move(adj);
    m.labels = std::move(lab);
    return m;
}

}   // namespace parmc
