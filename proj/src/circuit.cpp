#include "tempavg/circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "tempavg/gf2.hpp"

namespace tempavg {

namespace {

constexpr std::array<std::pair<GateKind, const char*>, 9> kNames = {{
    {GateKind::Not, "not"},
    {GateKind::Cnot, "cnot"},
    {GateKind::Cz, "cz"},
    {GateKind::PhaseS, "phase_s"},
    {GateKind::RotY90, "rot_y_90"},
    {GateKind::Swap, "swap"},
    {GateKind::GenToffoli, "gen_toffoli"},
    {GateKind::Conditioned, "conditioned"},
    {GateKind::PermPhase, "perm_phase"},
}};

const cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

std::size_t arity(GateKind k) {
  switch (k) {
    case GateKind::Not:
    case GateKind::PhaseS:
    case GateKind::RotY90:
    case GateKind::Conditioned:
      return 1;
    case GateKind::Cnot:
    case GateKind::Cz:
    case GateKind::Swap:
      return 2;
    default:
      return 0;  // variable
  }
}

void validate(const Gate& g, int n) {
  const auto bad = [](const std::string& why) { throw std::invalid_argument("gate: " + why); };
  if (g.qubits.empty()) bad("no qubits");
  for (int q : g.qubits)
    if (q < 0 || q >= n) bad("qubit index out of range");
  auto sorted = g.qubits;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) bad("repeated qubit");
  const std::size_t a = arity(g.kind);
  if (a != 0 && g.qubits.size() != a) bad("wrong number of qubits for " + gate_kind_name(g.kind));
  if (g.kind == GateKind::GenToffoli) {
    if (g.polarity.size() + 1 != g.qubits.size()) bad("toffoli polarity size");
    for (int p : g.polarity)
      if (p != 0 && p != 1) bad("polarity must be 0 or 1");
  }
  if (g.kind == GateKind::Conditioned) {
    if (!g.inner) bad("conditioned gate without inner circuit");
    if (g.inner->n_qubits() != n) bad("inner circuit register size mismatch");
    if (g.polarity.size() != 1 || (g.polarity[0] != 0 && g.polarity[0] != 1)) bad("conditioned polarity");
    for (const auto& ig : g.inner->gates()) {
      auto sup = ig.support();
      if (std::find(sup.begin(), sup.end(), g.qubits[0]) != sup.end()) bad("inner circuit touches control qubit");
    }
  }
  if (g.kind == GateKind::PermPhase) {
    if (g.qubits.size() > 20) bad("perm_phase register too large");
    const std::size_t dim = std::size_t{1} << g.qubits.size();
    if (g.perm.size() != dim || g.phases.size() != dim) bad("perm_phase table size");
    std::vector<bool> hit(dim, false);
    for (auto p : g.perm) {
      if (p >= dim || hit[p]) bad("perm_phase permutation is not a bijection");
      hit[p] = true;
    }
  }
}

std::uint64_t bit_of(int q, int n) { return std::uint64_t{1} << (n - 1 - q); }

}  // namespace

std::string gate_kind_name(GateKind k) {
  for (const auto& [kind, name] : kNames)
    if (kind == k) return name;
  throw std::invalid_argument("unknown gate kind");
}

GateKind gate_kind_from_name(const std::string& s) {
  for (const auto& [kind, name] : kNames)
    if (s == name) return kind;
  throw std::invalid_argument("unknown gate kind: " + s);
}

Gate Gate::x(int q) { return {GateKind::Not, {q}, {}, {}, {}, nullptr}; }
Gate Gate::cnot(int control, int target) { return {GateKind::Cnot, {control, target}, {}, {}, {}, nullptr}; }
Gate Gate::cz(int a, int b) { return {GateKind::Cz, {a, b}, {}, {}, {}, nullptr}; }
Gate Gate::s(int q) { return {GateKind::PhaseS, {q}, {}, {}, {}, nullptr}; }
Gate Gate::ry90(int q) { return {GateKind::RotY90, {q}, {}, {}, {}, nullptr}; }
Gate Gate::swap(int a, int b) { return {GateKind::Swap, {a, b}, {}, {}, {}, nullptr}; }

Gate Gate::toffoli(std::vector<int> controls, std::vector<int> polarity, int target) {
  controls.push_back(target);
  return {GateKind::GenToffoli, std::move(controls), std::move(polarity), {}, {}, nullptr};
}

Gate Gate::conditioned(int control, int polarity, Circuit inner) {
  return {GateKind::Conditioned, {control}, {polarity}, {}, {}, std::make_shared<const Circuit>(std::move(inner))};
}

Gate Gate::perm_phase(std::vector<int> qubits, std::vector<std::uint32_t> perm, std::vector<int> phases) {
  for (auto& p : phases) p = ((p % 4) + 4) % 4;
  return {GateKind::PermPhase, std::move(qubits), {}, std::move(perm), std::move(phases), nullptr};
}

std::vector<int> Gate::support() const {
  std::vector<int> s = qubits;
  if (kind == GateKind::Conditioned && inner) {
    for (const auto& g : inner->gates()) {
      auto sub = g.support();
      s.insert(s.end(), sub.begin(), sub.end());
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return s;
}

bool Gate::is_clifford() const {
  switch (kind) {
    case GateKind::GenToffoli:
      return qubits.size() <= 2;
    case GateKind::Conditioned:
      return false;
    default:
      return true;  // perm_phase is checked numerically where it matters
  }
}

Circuit::Circuit(int n_qubits) : n_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 2 * kMaxFieldDegree) throw std::invalid_argument("Circuit: qubit count out of range");
}

std::size_t Circuit::count(GateKind k) const {
  return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(), [k](const Gate& g) { return g.kind == k; }));
}

Circuit& Circuit::add(Gate g) {
  validate(g, n_);
  gates_.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_ != n_) throw std::invalid_argument("Circuit::append: register size mismatch");
  gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  return *this;
}

Circuit Circuit::widened(int n_total) const {
  if (n_total < n_) throw std::invalid_argument("Circuit::widened: cannot shrink");
  Circuit out(n_total);
  for (const auto& g : gates_) {
    Gate w = g;
    if (g.kind == GateKind::Conditioned) w.inner = std::make_shared<const Circuit>(g.inner->widened(n_total));
    out.add(std::move(w));
  }
  return out;
}

void apply_gate(std::span<cplx> psi, int n, const Gate& g) {
  const std::uint64_t dim = std::uint64_t{1} << n;
  if (psi.size() != dim) throw std::invalid_argument("apply_gate: state size mismatch");
  switch (g.kind) {
    case GateKind::Not: {
      const auto m = bit_of(g.qubits[0], n);
      for (std::uint64_t i = 0; i < dim; ++i)
        if (!(i & m)) std::swap(psi[i], psi[i | m]);
      break;
    }
    case GateKind::Cnot: {
      const auto c = bit_of(g.qubits[0], n), t = bit_of(g.qubits[1], n);
      for (std::uint64_t i = 0; i < dim; ++i)
        if ((i & c) && !(i & t)) std::swap(psi[i], psi[i | t]);
      break;
    }
    case GateKind::Cz: {
      const auto a = bit_of(g.qubits[0], n), b = bit_of(g.qubits[1], n);
      for (std::uint64_t i = 0; i < dim; ++i)
        if ((i & a) && (i & b)) psi[i] = -psi[i];
      break;
    }
    case GateKind::PhaseS: {
      const auto m = bit_of(g.qubits[0], n);
      for (std::uint64_t i = 0; i < dim; ++i)
        if (i & m) psi[i] *= cplx(0, 1);
      break;
    }
    case GateKind::RotY90: {
      const auto m = bit_of(g.qubits[0], n);
      const double h = 1.0 / std::sqrt(2.0);
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & m) continue;
        const cplx a0 = psi[i], a1 = psi[i | m];
        psi[i] = h * (a0 - a1);
        psi[i | m] = h * (a0 + a1);
      }
      break;
    }
    case GateKind::Swap: {
      const auto a = bit_of(g.qubits[0], n), b = bit_of(g.qubits[1], n);
      for (std::uint64_t i = 0; i < dim; ++i)
        if ((i & a) && !(i & b)) std::swap(psi[i], psi[(i ^ a) | b]);
      break;
    }
    case GateKind::GenToffoli: {
      const std::size_t nc = g.polarity.size();
      std::uint64_t cmask = 0, cval = 0;
      for (std::size_t k = 0; k < nc; ++k) {
        cmask |= bit_of(g.qubits[k], n);
        if (g.polarity[k]) cval |= bit_of(g.qubits[k], n);
      }
      const auto t = bit_of(g.qubits.back(), n);
      for (std::uint64_t i = 0; i < dim; ++i)
        if ((i & cmask) == cval && !(i & t)) std::swap(psi[i], psi[i | t]);
      break;
    }
    case GateKind::Conditioned: {
      const auto m = bit_of(g.qubits[0], n);
      const bool want = g.polarity[0] == 1;
      std::vector<cplx> copy(psi.begin(), psi.end());
      apply_circuit(copy, *g.inner);
      for (std::uint64_t i = 0; i < dim; ++i)
        if (((i & m) != 0) == want) psi[i] = copy[i];
      break;
    }
    case GateKind::PermPhase: {
      const int m = static_cast<int>(g.qubits.size());
      std::vector<std::uint64_t> masks(static_cast<std::size_t>(m));
      std::uint64_t all = 0;
      for (int k = 0; k < m; ++k) {
        masks[k] = bit_of(g.qubits[k], n);
        all |= masks[k];
      }
      auto sub_of = [&](std::uint64_t i) {
        std::uint32_t s = 0;
        for (int k = 0; k < m; ++k)
          if (i & masks[k]) s |= 1U << (m - 1 - k);
        return s;
      };
      auto embed = [&](std::uint64_t base, std::uint32_t s) {
        for (int k = 0; k < m; ++k)
          if ((s >> (m - 1 - k)) & 1U) base |= masks[k];
        return base;
      };
      std::vector<cplx> out(dim);
      for (std::uint64_t i = 0; i < dim; ++i) {
        const std::uint32_t s = sub_of(i);
        out[embed(i & ~all, g.perm[s])] = kIPow[g.phases[s]] * psi[i];
      }
      std::copy(out.begin(), out.end(), psi.begin());
      break;
    }
  }
}

void apply_circuit(std::span<cplx> psi, const Circuit& c) {
  for (const auto& g : c.gates()) apply_gate(psi, c.n_qubits(), g);
}

Eigen::MatrixXcd unitary(const Circuit& c) {
  const Eigen::Index dim = Eigen::Index{1} << c.n_qubits();
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col)
    apply_circuit(std::span<cplx>(u.col(col).data(), static_cast<std::size_t>(dim)), c);
  return u;
}

nlohmann::json circuit_to_json(const Circuit& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : c.gates()) {
    nlohmann::json j{{"kind", gate_kind_name(g.kind)}, {"qubits", g.qubits}};
    if (g.kind == GateKind::GenToffoli || g.kind == GateKind::Conditioned) j["polarity"] = g.polarity;
    if (g.kind == GateKind::PermPhase) {
      j["perm"] = g.perm;
      j["phases"] = g.phases;
    }
    if (g.kind == GateKind::Conditioned) j["inner"] = circuit_to_json(*g.inner);
    gates.push_back(std::move(j));
  }
  return {{"n_qubits", c.n_qubits()}, {"gates", gates}};
}

Circuit circuit_from_json(const nlohmann::json& j) {
  try {
    Circuit c(j.at("n_qubits").get<int>());
    for (const auto& jg : j.at("gates")) {
      Gate g;
      g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
      g.qubits = jg.at("qubits").get<std::vector<int>>();
      if (jg.contains("polarity")) g.polarity = jg.at("polarity").get<std::vector<int>>();
      if (g.kind == GateKind::PermPhase) {
        g.perm = jg.at("perm").get<std::vector<std::uint32_t>>();
        g.phases = jg.at("phases").get<std::vector<int>>();
      }
      if (g.kind == GateKind::Conditioned) g.inner = std::make_shared<const Circuit>(circuit_from_json(jg.at("inner")));
      c.add(std::move(g));
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("gate list: ") + e.what());
  }
}

}  // namespace tempavg
