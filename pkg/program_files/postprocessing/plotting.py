# -*- coding: utf-8 -*-
"""
    Figures of the analysis results.
"""
import logging

import numpy as np
from matplotlib import pyplot as plt
from scipy import stats


def plot_frequency_histogram(obs, model, path: str) -> None:
    """
        Histogram of the allele percentages at the variable sites with
        the weighted component densities of the fitted mixture model.

        :param obs: allele percentages
        :type obs: FrequencyObservations
        :param model: fitted mixture model
        :type model: MixtureModel
        :param path: target image file
        :type path: str
    """
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.hist(obs.values, bins=np.arange(0, 101, 2), density=True,
            color="lightgrey", edgecolor="grey")
    grid = np.linspace(0, 100, 501)
    for component in model.components:
        ax.plot(grid, component.weight * stats.norm.pdf(
            grid, loc=component.mu, scale=component.sigma),
            label="mu {:.1f}".format(component.mu))
    ax.set_xlabel("allele percentage")
    ax.set_ylabel("density")
    ax.legend(loc="upper center", prop={"size": 8})
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    logging.info("\t Histogram saved as " + str(path))


def plot_roc_curve(curve: list, auc: float, path: str) -> None:
    """ ROC curve of the mixed sample detection """
    fpr, tpr = zip(*curve)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot(fpr, tpr, drawstyle="steps-post",
            label="AUC {:.3f}".format(auc))
    ax.plot([0, 1], [0, 1], linestyle="--", color="grey")
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.legend(loc="lower right")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)


def plot_proportions(table, path: str) -> None:
    """
        Estimated against true major strain proportion of the samples
        called mixed.

        :param table: proportions table with the columns true_major \
            and estimated_major
        :type table: pandas.DataFrame
    """
    table = table.dropna(subset=["estimated_major"])
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(table["true_major"], table["estimated_major"])
    ax.plot([0.5, 1], [0.5, 1], linestyle="--", color="grey")
    ax.set_xlabel("true major proportion")
    ax.set_ylabel("estimated major proportion")
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
