#include "sscl/kinetic.hpp"

#include <cmath>
#include <stdexcept>

#include "sscl/util.hpp"

namespace sscl::kinetic {

XiGrid XiGrid::make(double lo, double hi, int bins) {
    if (!(hi > lo)) throw std::invalid_argument("kinetic: xi range must be nonempty");
    if (bins < 16) throw std::invalid_argument("kinetic: need at least 16 xi bins");
    return {lo, hi, bins};
}

std::vector<std::uint8_t> kinetic_function(const ScalarField& u, const XiGrid& xi) {
    std::vector<std::uint8_t> rho(u.size() * xi.bins);
    for (size_t i = 0; i < u.size(); ++i)
        for (int b = 0; b < xi.bins; ++b)
            rho[i * xi.bins + b] = xi.center(b) < u[i] ? 1 : 0;
    return rho;
}

void KineticMeasure::merge(const KineticMeasure& other) {
    if (mass.size() != other.mass.size())
        throw std::invalid_argument("kinetic: measure shapes differ");
    for (size_t i = 0; i < mass.size(); ++i) mass[i] += other.mass[i];
    overflow_mass += other.overflow_mass;
    total_mass += other.total_mass;
    moment_2p += other.moment_2p;
}

namespace {

// Number of bin centers strictly below u.
int centers_below(const XiGrid& xi, double u) {
    const double y = (u - xi.lo) / xi.dxi() - 0.5;
    const int c = static_cast<int>(std::ceil(y));
    return std::max(0, std::min(xi.bins, c));
}

}  // namespace

void KineticMeasureAccumulator::on_begin(const solver::SimConfig& cfg,
                                         std::uint64_t /*path_id*/, int steps, double dt) {
    man_ = cfg.man.get();
    t_final_ = steps * dt;
    const geom::ChartGrid& g = man_->grid;

    int per_axis = opt_.x_cells_target;
    if (g.dim == 2)
        per_axis = std::max(1, static_cast<int>(std::floor(std::sqrt(
                                   static_cast<double>(opt_.x_cells_target)))));
    cx_ = std::max(1, (g.n1 + per_axis - 1) / per_axis);
    cy_ = g.dim == 2 ? std::max(1, (g.n2 + per_axis - 1) / per_axis) : 1;
    const int cells1 = (g.n1 + cx_ - 1) / cx_;
    const int cells2 = g.dim == 2 ? (g.n2 + cy_ - 1) / cy_ : 1;

    m_ = KineticMeasure{};
    m_.xi = opt_.xi;
    m_.t_bins = opt_.t_bins;
    m_.x_cells = cells1 * cells2;
    m_.mass.assign(static_cast<size_t>(m_.t_bins) * m_.x_cells * opt_.xi.bins, 0.0);
}

void KineticMeasureAccumulator::on_step(const solver::StepContext& ctx) {
    if (ctx.cfg->eps <= 0.0 || !ctx.grad_energy_nodal) return;
    const geom::ChartGrid& g = man_->grid;
    const double eps_dt = ctx.cfg->eps * ctx.dt;
    int tb = static_cast<int>(ctx.t_pre / t_final_ * m_.t_bins);
    tb = std::max(0, std::min(m_.t_bins - 1, tb));
    const int cells1 = (g.n1 + cx_ - 1) / cx_;

    KahanSum total, moment;
    total.add(m_.total_mass);
    moment.add(m_.moment_2p);
    for (int j = 0; j < g.n2; ++j) {
        for (int i = 0; i < g.n1; ++i) {
            const int c = g.idx(i, j);
            const double dep = eps_dt * (*ctx.grad_energy_nodal)[c];
            if (dep == 0.0) continue;
            const double u = ctx.u_pre[c];
            const int b = m_.xi.bin(u);
            const int cell = (j / cy_) * cells1 + (i / cx_);
            if (b < 0) {
                m_.overflow_mass += dep;
                moment.add(dep * std::pow(std::abs(u), 2.0 * opt_.moment_p));
            } else {
                m_.at(tb, cell, b) += dep;
                moment.add(dep * std::pow(std::abs(m_.xi.center(b)), 2.0 * opt_.moment_p));
            }
            total.add(dep);
        }
    }
    m_.total_mass = total.value();
    m_.moment_2p = moment.value();
}

double young_moment(const Manifold& man, const ScalarField& u, double p) {
    if (p < 1.0) throw std::invalid_argument("kinetic: moment order p must be >= 1");
    const double area = man.grid.cell_area();
    KahanSum s;
    for (size_t i = 0; i < u.size(); ++i)
        s.add(std::pow(std::abs(u[i]), p) * man.metric.sqrt_det[i] * area);
    return s.value();
}

double young_moment_binned(const Manifold& man, const ScalarField& u, double p,
                           const XiGrid& xi) {
    const double area = man.grid.cell_area();
    KahanSum s;
    for (size_t i = 0; i < u.size(); ++i) {
        const int b = xi.bin(u[i]);
        const double v = b < 0 ? u[i] : xi.center(b);
        s.add(std::pow(std::abs(v), p) * man.metric.sqrt_det[i] * area);
    }
    return s.value();
}

double Bump::value(double x) const {
    const double s = (x - center) / halfwidth;
    if (std::abs(s) >= 1.0) return 0.0;
    return amp * std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double Bump::deriv(double x) const {
    const double s = (x - center) / halfwidth;
    if (std::abs(s) >= 1.0) return 0.0;
    const double t = 1.0 - s * s;
    return value(x) * (-2.0 * s / (t * t)) / halfwidth;
}

namespace {

double wrap_to(double x, double center, double period) {
    return x - period * std::round((x - center) / period);
}

}  // namespace

WeakResidualAccumulator::WeakResidualAccumulator(TestFunction psi, XiGrid xi)
    : psi_(psi), xi_(xi) {}

void WeakResidualAccumulator::on_begin(const solver::SimConfig& cfg,
                                       std::uint64_t /*path_id*/, int steps, double dt) {
    man_ = cfg.man.get();
    cfg_ = &cfg;
    t_final_ = steps * dt;
    if (psi_.phi_t.value(t_final_) != 0.0)
        throw std::invalid_argument("kinetic: test function must vanish at t = T");
    if (psi_.phi_xi.center - psi_.phi_xi.halfwidth < xi_.lo ||
        psi_.phi_xi.center + psi_.phi_xi.halfwidth > xi_.hi)
        throw std::invalid_argument("kinetic: phi_xi support exceeds the xi grid");

    const geom::ChartGrid& g = man_->grid;
    phix_.assign(g.node_count(), 1.0);
    grad_phix_.c1.assign(g.node_count(), 0.0);
    if (g.dim == 2) grad_phix_.c2.assign(g.node_count(), 0.0);
    if (!psi_.phi_x_constant) {
        for (int j = 0; j < g.n2; ++j) {
            for (int i = 0; i < g.n1; ++i) {
                const int c = g.idx(i, j);
                const double x1 = wrap_to(g.x1(i), psi_.phi_x1.center, g.period1);
                const double b1 = psi_.phi_x1.value(x1);
                const double d1 = psi_.phi_x1.deriv(x1);
                if (g.dim == 1) {
                    phix_[c] = b1;
                    grad_phix_.c1[c] = d1;
                } else {
                    const double x2 = wrap_to(g.x2(j), psi_.phi_x2.center, g.period2);
                    const double b2 = psi_.phi_x2.value(x2);
                    const double d2 = psi_.phi_x2.deriv(x2);
                    phix_[c] = b1 * b2;
                    grad_phix_.c1[c] = d1 * b2;
                    grad_phix_.c2[c] = b1 * d2;
                }
            }
        }
    }
    lap_phix_ = geom::laplace_beltrami(*man_, phix_);

    // Prefix tables over bin centers for the xi integrals of rho * (...).
    cum_phixi_.assign(xi_.bins, 0.0);
    cum_ap_phixi_.assign(cfg.flux.modes.size(), std::vector<double>(xi_.bins, 0.0));
    double acc = 0.0;
    std::vector<double> acc_m(cfg.flux.modes.size(), 0.0);
    for (int b = 0; b < xi_.bins; ++b) {
        const double c = xi_.center(b);
        const double w = psi_.phi_xi.value(c) * xi_.dxi();
        acc += w;
        cum_phixi_[b] = acc;
        for (size_t m = 0; m < cfg.flux.modes.size(); ++m) {
            acc_m[m] += cfg.flux.modes[m].profile.aprime(c) * w;
            cum_ap_phixi_[m][b] = acc_m[m];
        }
    }

    terms_ = Terms{};
    // T2: initial-data term, evaluated once.
    const ScalarField u0 = solver::sample_initial(*man_, cfg.u0);
    KahanSum t2;
    const double area = g.cell_area();
    for (int c = 0; c < g.node_count(); ++c)
        t2.add(man_->metric.sqrt_det[c] * area * phix_[c] * xi_prefix(u0[c], cum_phixi_));
    terms_.t2 = t2.value() * psi_.phi_t.value(0.0);
}

double WeakResidualAccumulator::xi_prefix(double u, const std::vector<double>& table) const {
    const int c = centers_below(xi_, u);
    return c == 0 ? 0.0 : table[c - 1];
}

void WeakResidualAccumulator::on_step(const solver::StepContext& ctx) {
    const geom::ChartGrid& g = man_->grid;
    const double area = g.cell_area();
    const double t0 = ctx.t_pre;
    const double t1 = ctx.t_pre + ctx.dt;
    const double tm = 0.5 * (t0 + t1);
    const double pt0 = psi_.phi_t.value(t0);
    const double ptm = psi_.phi_t.value(tm);
    const double dpt = psi_.phi_t.value(t1) - pt0;

    KahanSum s1, s3, s4, g2s;
    std::vector<double> stoch_k(ctx.block ? ctx.block->db.size() : 0, 0.0);
    for (int c = 0; c < g.node_count(); ++c) {
        const double dv = man_->metric.sqrt_det[c] * area;
        const double u = ctx.u_pre[c];
        const double pref = xi_prefix(u, cum_phixi_);
        s1.add(dv * phix_[c] * pref);
        s4.add(dv * lap_phix_[c] * pref);
        double conv = 0.0;
        for (size_t m = 0; m < cfg_->flux.modes.size(); ++m) {
            const auto& vn = cfg_->flux.modes[m].v_node;
            double pair = vn.c1[c] * grad_phix_.c1[c];
            if (g.dim == 2) pair += vn.c2[c] * grad_phix_.c2[c];
            conv += pair * xi_prefix(u, cum_ap_phixi_[m]);
        }
        s3.add(dv * conv);

        const double pxi_u = psi_.phi_xi.value(u);
        const double dpxi_u = psi_.phi_xi.deriv(u);
        if (ctx.block && pxi_u != 0.0) {
            for (size_t k = 0; k < stoch_k.size(); ++k)
                stoch_k[k] += dv * noise::g_eval(cfg_->noise, static_cast<int>(k) + 1, c, u) *
                              phix_[c] * pxi_u;
        }
        if (dpxi_u != 0.0)
            g2s.add(dv * noise::G2_eval(cfg_->noise, c, u) * phix_[c] * dpxi_u);

        // Measure term with deposits snapped to bin centers.
        if (ctx.cfg->eps > 0.0 && ctx.grad_energy_nodal) {
            const double dep = ctx.cfg->eps * ctx.dt * (*ctx.grad_energy_nodal)[c];
            if (dep != 0.0) {
                const int b = xi_.bin(u);
                const double snapped = b < 0 ? u : xi_.center(b);
                terms_.m_term += dep * ptm * phix_[c] * psi_.phi_xi.deriv(snapped);
            }
        }
    }
    terms_.t1 += s1.value() * dpt;
    terms_.t3 += s3.value() * ptm * ctx.dt;
    terms_.t4 += cfg_->eps * s4.value() * ptm * ctx.dt;
    terms_.g2 += 0.5 * g2s.value() * ptm * ctx.dt;
    if (ctx.block)
        for (size_t k = 0; k < stoch_k.size(); ++k)
            terms_.stoch += stoch_k[k] * pt0 * ctx.block->db[k];
}

double WeakResidualAccumulator::residual() const {
    return terms_.t1 + terms_.t2 + terms_.t3 + terms_.t4 - terms_.m_term + terms_.stoch +
           terms_.g2;
}

ContractionValues contraction_functional(const Manifold& man, const ScalarField& u1,
                                         const ScalarField& u2, const XiGrid& xi) {
    if (u1.size() != u2.size())
        throw std::invalid_argument("kinetic: fields live on different grids");
    ContractionValues out;
    const double area = man.grid.cell_area();
    KahanSum direct, kin;
    for (size_t i = 0; i < u1.size(); ++i) {
        const double dv = man.metric.sqrt_det[i] * area;
        direct.add(std::abs(u1[i] - u2[i]) * dv);
        // 4 (rbar - rbar^2) is 1 exactly on bins where the indicators differ.
        const int n1 = centers_below(xi, u1[i]);
        const int n2 = centers_below(xi, u2[i]);
        kin.add(std::abs(n1 - n2) * xi.dxi() * dv);
    }
    out.direct = direct.value();
    out.kinetic = kin.value();
    return out;
}

}  // namespace sscl::kinetic
