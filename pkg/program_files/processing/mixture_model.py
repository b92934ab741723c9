# -*- coding: utf-8 -*-
"""
    Estimation of the strain proportions of a mixed sample.

    The allele percentages observed at the variable sites form clusters
    around the proportions of the constituent strains (and their
    complements). A binomial or Gaussian mixture model is fitted to
    these percentages by expectation maximization and its component
    means are converted into strain proportions.
"""
from dataclasses import dataclass, field
from itertools import product
import logging

import numpy as np
import pandas
from scipy import stats
from scipy.special import logsumexp

from program_files.preprocessing.filter_profile import variable_sites
from program_files.processing.hypothesis_test import EstimationError

FAMILIES = ("binomial", "gaussian")
COMPONENT_MODES = ("paired", "direct")
SIGMA_FLOOR = 1e-3
WEIGHT_FLOOR = 1e-6
MAX_RESTARTS = 5
# maximal distance of a complement pair's mean sum from 100
PAIRING_TOLERANCE = 15.0


class NoVariantEvidenceError(ValueError):
    """ raised if a profile has no variable site to learn from """


@dataclass
class FrequencyObservations:
    values: np.ndarray
    site_index: np.ndarray
    depths: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    @property
    def counts(self) -> np.ndarray:
        """ allele counts behind the percentages """
        return np.rint(self.values * self.depths / 100)


@dataclass
class MixtureComponent:
    mu: float
    sigma: float
    weight: float


@dataclass
class MixtureModel:
    family: str
    components: list
    log_likelihood: float = float("nan")
    log_likelihood_history: list = field(default_factory=list)
    n_iter: int = 0
    converged: bool = False
    restarts: int = 0

    @property
    def K(self) -> int:
        return len(self.components)

    @property
    def means(self) -> np.ndarray:
        return np.array([component.mu for component in self.components])

    @property
    def sigmas(self) -> np.ndarray:
        return np.array([component.sigma for component in self.components])

    @property
    def weights(self) -> np.ndarray:
        return np.array([component.weight
                         for component in self.components])


@dataclass
class ProportionEstimate:
    """
        ``components`` lists the model components a direct estimate is
        based on, ``pairing`` the complement pairs of a paired one.
    """
    proportions: list
    pairing: list
    method: str
    warnings: list = field(default_factory=list)
    components: list = field(default_factory=list)


def build_observations(profile, config=None) -> FrequencyObservations:
    """
        Collects the allele percentages of the variable sites. Every
        allele at or above the noise threshold which is not fixed
        (below 100 - noise threshold) contributes one value.

        :param profile: filtered sample
        :type profile: SampleProfile
        :param config: filter parameters, defaults to the profile's
        :type config: FilterConfig

        :return: - **observations** (FrequencyObservations) - values \
            ordered by position
        :raise: - **NoVariantEvidenceError** - no variable site
    """
    config = config or profile.config
    threshold = config.noise_threshold
    values, positions, depths = [], [], []
    for site in variable_sites(profile, config):
        for percent in site.percent.values():
            if 0 < percent < 100 and threshold <= percent <= 100 - threshold:
                values.append(percent)
                positions.append(site.position)
                depths.append(site.depth)
    if not values:
        raise NoVariantEvidenceError("no variant evidence: the profile has "
                                     "no variable site")
    logging.info("\t {} allele frequencies at {} variable sites".format(
        len(values), len(set(positions))))
    return FrequencyObservations(values=np.array(values, dtype=float),
                                 site_index=np.array(positions, dtype=int),
                                 depths=np.array(depths, dtype=float))


def component_count(n_strains: int, mode: str = "paired") -> int:
    """
        Number of mixture components used for n_strains strains. Each
        strain of a sample with three or more strains shows up at its
        own proportion and at the complement, "paired" mode therefore
        fits two components per strain.
    """
    if n_strains < 1:
        raise ValueError("at least one strain is required")
    if mode not in COMPONENT_MODES:
        raise ValueError("unknown component mode " + str(mode))
    if mode == "direct" or n_strains <= 2:
        return n_strains
    return 2 * n_strains


def _log_densities(obs: FrequencyObservations, family: str, mu, sigma
                   ) -> np.ndarray:
    """ (n_observations, K) matrix of log f(x_n | mu_k, sigma_k) """
    if family == "gaussian":
        return stats.norm.logpdf(obs.values[:, None], loc=mu[None, :],
                                 scale=sigma[None, :])
    return stats.binom.logpmf(obs.counts[:, None], obs.depths[:, None],
                              mu[None, :] / 100)


def _e_step(obs, family, mu, sigma, weight) -> tuple:
    with np.errstate(divide="ignore"):
        joint = _log_densities(obs, family, mu, sigma) + np.log(weight)
    log_norm = logsumexp(joint, axis=1)
    responsibilities = np.exp(joint - log_norm[:, None])
    return responsibilities, float(np.sum(log_norm))


def _m_step(obs, family, responsibilities) -> tuple:
    totals = responsibilities.sum(axis=0)
    weight = totals / len(obs)
    safe_totals = np.where(totals > 0, totals, 1)
    if family == "gaussian":
        mu = responsibilities.T @ obs.values / safe_totals
        variance = np.sum(responsibilities
                          * (obs.values[:, None] - mu[None, :]) ** 2,
                          axis=0) / safe_totals
        sigma = np.sqrt(variance)
    else:
        trials = responsibilities.T @ obs.depths
        q = responsibilities.T @ obs.counts / np.where(trials > 0, trials, 1)
        mu = 100 * q
        # binomial spread of a percentage at the mean depth of the
        # component's observations
        mean_depth = trials / safe_totals
        sigma = 100 * np.sqrt(q * (1 - q) / np.where(mean_depth > 0,
                                                     mean_depth, 1))
    return mu, sigma, weight


def _initial_means(obs: FrequencyObservations, K: int, attempt: int,
                   rng: np.random.Generator) -> np.ndarray:
    """
        Evenly spaced quantiles of the observations, perturbed with
        noise growing with the number of restarts.
    """
    quantiles = np.quantile(obs.values, (np.arange(K) + 0.5) / K)
    spread = max(np.ptp(obs.values), 1.0)
    mu = quantiles + rng.normal(0, 0.01 * spread * (attempt + 1), size=K)
    return np.clip(mu, 0.5, 99.5)


def em_fit(obs: FrequencyObservations, K: int, family: str = "gaussian",
           tol: float = 1e-6, max_iter: int = 500, seed: int = 0,
           initial_means=None) -> MixtureModel:
    """
        Fits a K-component mixture model to the observations by
        expectation maximization.

        For the binomial family the count behind each percentage is
        binomially distributed with the site's depth as number of
        trials, sigma is derived from the fitted mean. The Gaussian
        family fits a free sigma per component. A fit whose components
        collapse (sigma below 1e-3 or weight below 1e-6) is restarted
        with a new perturbation of the start values.

        :param obs: allele percentages
        :type obs: FrequencyObservations
        :param K: number of components
        :type K: int
        :param family: "binomial" or "gaussian"
        :type family: str
        :param tol: minimal log-likelihood improvement per iteration
        :type tol: float
        :param max_iter: maximal number of iterations per attempt
        :type max_iter: int
        :param seed: seed of the start value perturbation
        :type seed: int
        :param initial_means: optional start means replacing the \
            quantile initialization of the first attempt
        :type initial_means: list

        :return: - **model** (MixtureModel) - components sorted by \
            descending mean
        :raise: - **ValueError** - invalid K or family, less than K \
                    distinct values
                - **EstimationError** - collapse after all restarts
    """
    if K < 1:
        raise ValueError("at least one component is required")
    if family not in FAMILIES:
        raise ValueError("unknown mixture family " + str(family))
    if len(np.unique(obs.values)) < K:
        raise ValueError("{} components need at least {} distinct "
                         "values".format(K, K))
    rng = np.random.default_rng(seed)
    for attempt in range(MAX_RESTARTS + 1):
        if attempt == 0 and initial_means is not None:
            mu = np.array(initial_means, dtype=float)
        else:
            mu = _initial_means(obs, K, attempt, rng)
        sigma = np.full(K, max(np.std(obs.values) / K, 1.0))
        weight = np.full(K, 1 / K)
        history = []
        previous = -np.inf
        converged = False
        collapsed = False
        for iteration in range(max_iter):
            responsibilities, log_likelihood = _e_step(obs, family, mu,
                                                       sigma, weight)
            if log_likelihood < previous - 1e-9:
                logging.warning("\t EM log-likelihood decreased from {} to "
                                "{}".format(previous, log_likelihood))
            history.append(log_likelihood)
            if log_likelihood - previous < tol:
                converged = True
                break
            previous = log_likelihood
            new_mu, new_sigma, new_weight = _m_step(obs, family,
                                                    responsibilities)
            if K >= 2 and (np.any(new_sigma < SIGMA_FLOOR)
                           or np.any(new_weight < WEIGHT_FLOOR)):
                collapsed = True
                break
            mu, sigma, weight = new_mu, np.maximum(new_sigma, SIGMA_FLOOR), \
                new_weight
        if collapsed:
            logging.warning("\t EM components collapsed, restart {} of "
                            "{}".format(attempt + 1, MAX_RESTARTS))
            continue
        if not converged:
            logging.warning("\t EM stopped after {} iterations without "
                            "convergence".format(max_iter))
        order = np.argsort(-mu, kind="stable")
        components = [MixtureComponent(mu=float(mu[k]),
                                       sigma=float(sigma[k]),
                                       weight=float(weight[k]))
                      for k in order]
        logging.info("\t EM ({}, K={}) finished after {} iterations, "
                     "log-likelihood {:.4f}".format(family, K, len(history),
                                                    history[-1]))
        for component in components:
            logging.info("\t mu {:.3f}, sigma {:.3f}, weight {:.4f}".format(
                component.mu, component.sigma, component.weight))
        return MixtureModel(family=family,
                            components=components,
                            log_likelihood=history[-1],
                            log_likelihood_history=history,
                            n_iter=len(history),
                            converged=converged,
                            restarts=attempt)
    raise EstimationError("mixture components collapsed in {} "
                          "attempts".format(MAX_RESTARTS + 1),
                          best_iterate=(mu, sigma, weight))


def responsibilities(obs: FrequencyObservations, model: MixtureModel
                     ) -> np.ndarray:
    """ posterior component probabilities of every observation """
    gamma, _ = _e_step(obs, model.family, model.means, model.sigmas,
                       model.weights)
    return gamma


def _direct_estimate(model: MixtureModel, n_strains: int, method: str,
                     warnings: list) -> ProportionEstimate:
    """
        Normalizes the means of the n_strains heaviest components by
        their sum.
    """
    heaviest = np.argsort(-model.weights, kind="stable")[:n_strains]
    used = sorted(heaviest.tolist())
    means = model.means[used]
    proportions = sorted((means / means.sum()).tolist(), reverse=True)
    return ProportionEstimate(proportions=proportions,
                              pairing=[],
                              method=method,
                              warnings=warnings,
                              components=used)


def pair_components(model: MixtureModel) -> list:
    """
        Greedily pairs the components whose means sum up closest to 100.

        :return: - **pairs** (list) - (index high, index low) tuples \
            of component indices, the first with the larger mean
    """
    means = model.means
    candidates = sorted(
        ((abs(means[a] + means[b] - 100), a, b)
         for a in range(model.K) for b in range(a + 1, model.K)))
    used = set()
    pairs = []
    for distance, a, b in candidates:
        if a in used or b in used:
            continue
        used.update((a, b))
        pairs.append((a, b) if means[a] >= means[b] else (b, a))
    return pairs


def proportions_from_model(model: MixtureModel, n_strains: int,
                           mode: str = "paired") -> ProportionEstimate:
    """
        Converts the component means into strain proportions.

        In paired mode complement pairs (mu_a, mu_b) with mu_a + mu_b
        close to 100 are formed, every pair gives the strain value
        (mu_a + 100 - mu_b) / 2. With three or more strains either the
        value or its complement is a strain's proportion, the
        combination summing up closest to 100 is chosen. Direct mode
        normalizes the means by their sum.

        :param model: fitted mixture model
        :type model: MixtureModel
        :param n_strains: number of strains
        :type n_strains: int
        :param mode: "paired" or "direct"
        :type mode: str

        :return: - **estimate** (ProportionEstimate) - descending \
            proportions summing up to 1
    """
    if n_strains == 1:
        return ProportionEstimate(proportions=[1.0], pairing=[],
                                  method="single")
    if mode == "direct":
        return _direct_estimate(model, n_strains, "direct", [])
    if model.K != component_count(n_strains, mode):
        raise ValueError("{} components can not be paired to {} "
                         "strains".format(model.K, n_strains))
    means = model.means
    pairs = pair_components(model)
    if any(abs(means[a] + means[b] - 100) > PAIRING_TOLERANCE
           for a, b in pairs):
        warning = "components can not be paired to complements, " \
                  "proportions normalized directly"
        logging.warning("\t " + warning)
        return _direct_estimate(model, n_strains, "direct-fallback",
                                [warning])
    values = [(means[a] + 100 - means[b]) / 2 for a, b in pairs]
    if len(pairs) == 1:
        choice = (values[0], 100 - values[0])
        orientation = [True]
    else:
        # pick value or complement per pair, closest sum to 100 wins
        orientation = min(
            product((True, False), repeat=len(values)),
            key=lambda combination: abs(100 - sum(
                value if keep else 100 - value
                for value, keep in zip(values, combination))))
        choice = tuple(value if keep else 100 - value
                       for value, keep in zip(values, orientation))
    total = sum(choice)
    proportions = sorted((value / total for value in choice), reverse=True)
    pairing = [{"components": (int(a), int(b)),
                "high": float(means[a]), "low": float(means[b]),
                "value": float(value), "orientation": bool(keep)}
               for (a, b), value, keep in zip(pairs, values, orientation)]
    return ProportionEstimate(proportions=[float(value)
                                           for value in proportions],
                              pairing=pairing,
                              method="paired")


def strain_model(model: MixtureModel, estimate: ProportionEstimate
                 ) -> MixtureModel:
    """
        Reduces a model to one component per strain. Each strain of a
        complement paired model takes the member of its pair closest to
        the chosen strain value and the weight of the whole pair, a
        direct estimate keeps the components it is based on. Two
        component models are returned unchanged.
    """
    if estimate.method == "paired" and len(estimate.pairing) >= 2:
        components = []
        for pair in estimate.pairing:
            value = pair["value"] if pair["orientation"] \
                else 100 - pair["value"]
            members = [model.components[index]
                       for index in pair["components"]]
            member = min(members, key=lambda component: abs(component.mu
                                                             - value))
            components.append(MixtureComponent(
                mu=member.mu, sigma=member.sigma,
                weight=sum(component.weight for component in members)))
    elif estimate.components and len(estimate.components) < model.K:
        components = [MixtureComponent(mu=model.components[index].mu,
                                       sigma=model.components[index].sigma,
                                       weight=model.components[index].weight)
                      for index in estimate.components]
    else:
        return model
    total = sum(component.weight for component in components)
    for component in components:
        component.weight /= total
    components.sort(key=lambda component: -component.mu)
    return MixtureModel(family=model.family,
                        components=components,
                        log_likelihood=model.log_likelihood,
                        log_likelihood_history=model.log_likelihood_history,
                        n_iter=model.n_iter,
                        converged=model.converged,
                        restarts=model.restarts)


def write_histogram_table(obs: FrequencyObservations, model: MixtureModel,
                          path: str) -> None:
    """
        Writes the observations with their component responsibilities
        as tab separated table (value, depth, position,
        responsibility_0, ...).
    """
    gamma = responsibilities(obs, model)
    table = pandas.DataFrame({"value": obs.values,
                              "depth": obs.depths.astype(int),
                              "position": obs.site_index})
    for k in range(model.K):
        table["responsibility_{}".format(k)] = gamma[:, k]
    table.to_csv(path, sep="\t", index=False)
