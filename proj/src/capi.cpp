#include "spectel/spectel.h"

#include <cstring>
#include <new>
#include <string>
#include <variant>
#include <vector>

#include "spectel/cube_corner.hpp"
#include "spectel/errors.hpp"
#include "spectel/report.hpp"
#include "spectel/rng.hpp"
#include "spectel/sampler.hpp"
#include "spectel/target.hpp"

struct spectel_target {
  spectel::FiniteTarget target;
};

struct FiniteChain {
  const spectel::FiniteTarget target;
  std::size_t l;
  std::vector<std::size_t> state;
};

struct CornerChain {
  spectel::cube::CornerState state;
};

struct spectel_sampler {
  spectel::Rng rng;
  std::variant<FiniteChain, CornerChain> chain;
};

namespace {

thread_local std::string last_error;

spectel_status status_of(spectel::ErrorKind kind) {
  switch (kind) {
    case spectel::ErrorKind::Domain: return SPECTEL_ERR_DOMAIN;
    case spectel::ErrorKind::Parse: return SPECTEL_ERR_PARSE;
    case spectel::ErrorKind::Resource: return SPECTEL_ERR_RESOURCE;
    case spectel::ErrorKind::NumericalContract: return SPECTEL_ERR_NUMERICAL;
    case spectel::ErrorKind::StatisticalContract: return SPECTEL_ERR_STATISTICAL;
  }
  return SPECTEL_ERR_INTERNAL;
}

spectel_status fail(spectel_status status, const char* message) {
  last_error = message;
  return status;
}

template <class Fn>
spectel_status guard(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return SPECTEL_OK;
  } catch (const spectel::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPECTEL_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPECTEL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(SPECTEL_ERR_INTERNAL, "unknown failure");
  }
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

spectel::BoundTolerances to_bounds(const spectel_tolerances* tol) {
  spectel::BoundTolerances out;
  if (tol == nullptr) return out;
  for (double v : {tol->telescope, tol->bound, tol->lemma, tol->psd})
    if (!(v > 0.0)) throw spectel::DomainError("tolerances must be positive");
  out.telescope = tol->telescope;
  out.bound = tol->bound;
  out.lemma = tol->lemma;
  out.psd = tol->psd;
  return out;
}

void publish(const spectel::RunResult& result, char** report, int* pass) {
  *report = copy_string(result.report.dump(2));
  *pass = result.pass ? 1 : 0;
}

} // namespace

extern "C" {

const char* spectel_version(void) { return spectel::version_string(); }

const char* spectel_last_error(void) { return last_error.c_str(); }

spectel_tolerances spectel_default_tolerances(void) {
  const spectel::BoundTolerances d;
  return spectel_tolerances{d.telescope, d.bound, d.lemma, d.psd};
}

spectel_cube_options spectel_default_cube_options(void) {
  const spectel::CubeOptions d;
  return spectel_cube_options{d.n, d.steps, d.seed, d.tv_points, d.contraction_draws, d.eigen_degree};
}

void spectel_string_free(char* text) { delete[] text; }

spectel_status spectel_target_create(const size_t* axes, size_t n, const double* probs, size_t count,
                                     spectel_target** out) {
  if (out == nullptr || (n > 0 && axes == nullptr) || (count > 0 && probs == nullptr))
    return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    *out = new spectel_target{spectel::FiniteTarget(std::vector<std::size_t>(axes, axes + n),
                                                    std::vector<double>(probs, probs + count))};
  });
}

spectel_status spectel_target_from_json(const char* text, spectel_target** out) {
  if (out == nullptr || text == nullptr) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] { *out = new spectel_target{spectel::FiniteTarget::from_json(text)}; });
}

spectel_status spectel_target_random_dirichlet(const size_t* axes, size_t n, uint64_t seed, spectel_target** out) {
  if (out == nullptr || (n > 0 && axes == nullptr)) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    spectel::Rng rng(seed);
    *out = new spectel_target{spectel::random_dirichlet_target(std::vector<std::size_t>(axes, axes + n), rng)};
  });
}

spectel_status spectel_target_to_json(const spectel_target* target, char** out) {
  if (target == nullptr || out == nullptr) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] { *out = copy_string(target->target.to_json().dump()); });
}

size_t spectel_target_dims(const spectel_target* target) { return target ? target->target.dims() : 0; }

void spectel_target_free(spectel_target* target) { delete target; }

spectel_status spectel_verify_finite(const spectel_target* const* targets, size_t count, size_t l, uint64_t seed,
                                     const spectel_tolerances* tol, char** report, int* pass) {
  if ((count > 0 && targets == nullptr) || report == nullptr || pass == nullptr)
    return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    std::vector<spectel::FiniteTarget> list;
    for (size_t k = 0; k < count; ++k) {
      if (targets[k] == nullptr) throw spectel::DomainError("null target in list");
      list.push_back(targets[k]->target);
    }
    publish(spectel::verify_finite(list, l, seed, to_bounds(tol)), report, pass);
  });
}

spectel_status spectel_verify_finite_random(size_t count, const size_t* axes, size_t n, size_t l, uint64_t seed,
                                            const spectel_tolerances* tol, char** report, int* pass) {
  if ((n > 0 && axes == nullptr) || report == nullptr || pass == nullptr)
    return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const spectel::BoundTolerances bounds = to_bounds(tol);
    spectel::Rng rng(seed);
    std::vector<spectel::FiniteTarget> list;
    for (size_t k = 0; k < count; ++k)
      list.push_back(spectel::random_dirichlet_target(std::vector<std::size_t>(axes, axes + n), rng));
    publish(spectel::verify_finite(list, l, seed, bounds), report, pass);
  });
}

spectel_status spectel_verify_cube(const spectel_cube_options* options, char** report, int* pass) {
  if (options == nullptr || report == nullptr || pass == nullptr)
    return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    spectel::CubeOptions o;
    o.n = options->n;
    o.steps = options->steps;
    o.seed = options->seed;
    o.tv_points = options->tv_points;
    o.contraction_draws = options->contraction_draws;
    o.eigen_degree = options->eigen_degree;
    publish(spectel::verify_cube(o), report, pass);
  });
}

spectel_status spectel_report_merge(const char* const* reports, size_t count, char** merged, int* pass) {
  if ((count > 0 && reports == nullptr) || merged == nullptr || pass == nullptr)
    return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    std::vector<nlohmann::json> list;
    for (size_t k = 0; k < count; ++k) {
      if (reports[k] == nullptr) throw spectel::ParseError("null report text");
      try {
        list.push_back(nlohmann::json::parse(reports[k]));
      } catch (const nlohmann::json::parse_error& e) {
        throw spectel::ParseError("report " + std::to_string(k) + ": " + e.what());
      }
    }
    publish(spectel::merge_reports(list), merged, pass);
  });
}

spectel_status spectel_sampler_finite(const spectel_target* target, size_t l, uint64_t seed, spectel_sampler** out) {
  if (target == nullptr || out == nullptr) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    if (l < 1 || l > target->target.dims()) throw spectel::DomainError("block size must lie in 1..n");
    spectel::Rng rng(seed);
    auto state = spectel::exact_draw(target->target, rng);
    *out = new spectel_sampler{rng, FiniteChain{target->target, l, std::move(state)}};
  });
}

spectel_status spectel_sampler_cube(size_t n, uint64_t seed, spectel_sampler** out) {
  if (out == nullptr) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    spectel::Rng rng(seed);
    auto state = spectel::cube::stationary_draw(n, rng);
    *out = new spectel_sampler{rng, CornerChain{std::move(state)}};
  });
}

size_t spectel_sampler_dims(const spectel_sampler* sampler) {
  if (sampler == nullptr) return 0;
  if (const auto* f = std::get_if<FiniteChain>(&sampler->chain)) return f->state.size();
  return std::get<CornerChain>(sampler->chain).state.dims();
}

spectel_status spectel_sampler_step(spectel_sampler* sampler, size_t steps) {
  if (sampler == nullptr) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    if (auto* f = std::get_if<FiniteChain>(&sampler->chain)) {
      for (size_t t = 0; t < steps; ++t) spectel::gibbs_update(f->target, f->state, f->l, sampler->rng);
    } else {
      auto& c = std::get<CornerChain>(sampler->chain);
      for (size_t t = 0; t < steps; ++t) c.state = spectel::cube::gibbs_step(c.state, sampler->rng);
    }
  });
}

spectel_status spectel_sampler_state(const spectel_sampler* sampler, double* out, size_t capacity) {
  if (sampler == nullptr || out == nullptr) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  if (capacity < spectel_sampler_dims(sampler)) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "buffer too small");
  if (const auto* f = std::get_if<FiniteChain>(&sampler->chain)) {
    for (size_t k = 0; k < f->state.size(); ++k) out[k] = static_cast<double>(f->state[k]);
  } else {
    const auto& x = std::get<CornerChain>(sampler->chain).state.x;
    std::copy(x.begin(), x.end(), out);
  }
  return SPECTEL_OK;
}

spectel_status spectel_sampler_state_json(const spectel_sampler* sampler, char** out) {
  if (sampler == nullptr || out == nullptr) return fail(SPECTEL_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    nlohmann::json x;
    if (const auto* f = std::get_if<FiniteChain>(&sampler->chain)) x = f->state;
    else x = std::get<CornerChain>(sampler->chain).state.x;
    *out = copy_string(x.dump());
  });
}

void spectel_sampler_free(spectel_sampler* sampler) { delete sampler; }

} // extern "C"
