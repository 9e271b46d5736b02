"""The seed corpus: the applications the hub ships with.

Rows that name several variants are split into one manifest per variant, so
the corpus is 17 manifests. Runtime tags mirror each manifest's runtime so
the catalogue can be filtered by interpreter.
"""

from __future__ import annotations

from .manifest import ApplicationManifest, ValidationReport, validate_manifest

_GIT_RAW = "https://raw.githubusercontent.com/sandhub-apps"

DEMO_SOURCE = """\
demo_output <- function() {
  rows <- paste0("<li>sample ", seq_len(5), "</li>", collapse = "")
  paste0(
    "<h1>Demo</h1>",
    "<p>This application returns arbitrary HTML rendered by the page.</p>",
    "<ul>", rows, "</ul>"
  )
}
"""


def _app(name, runtime, short, long, tags, function, returns, parameters, source=None):
    slug = name.lower().replace(" ", "-")
    return {
        "name": name,
        "version": "1.0.0",
        "runtime": runtime,
        "short_description": short,
        "long_description": long,
        "tags": [runtime] + tags,
        "source": source or {"url": f"{_GIT_RAW}/{slug}/main/app.{'py' if runtime == 'python' else 'R'}"},
        "entry_point": {"function": function, "returns": returns, "parameters": parameters},
    }


def _path(name, description):
    return {"name": name, "kind": "path", "description": description}


SEED_DOCUMENTS = [
    _app(
        "netANOVApreprocessing",
        "r",
        "Builds a pairwise network dissimilarity matrix and writes it to output.txt.",
        "Reads a collection of networks, computes the dissimilarity between every "
        "pair, and writes the resulting matrix to output.txt, which can then be "
        "downloaded and fed to netANOVA. Source: "
        f"{_GIT_RAW}/netanovapreprocessing/main/app.R",
        ["networks", "preprocessing", "statistics"],
        "preprocess",
        "file",
        [
            _path("networks", "File holding the collection of networks to compare."),
            {
                "name": "distance",
                "kind": "string",
                "description": "Dissimilarity measure to apply to each pair.",
                "default": "edge-difference",
            },
        ],
    ),
    _app(
        "netANOVA",
        "r",
        "Hierarchical clustering of objects from a dissimilarity matrix, with per-group statistics.",
        "Takes a precomputed dissimilarity matrix (for example the output.txt "
        "produced by netANOVApreprocessing), clusters the objects hierarchically, "
        "and reports group memberships together with test statistics and p-values "
        "as a downloadable file.",
        ["networks", "clustering", "statistics"],
        "run_netanova",
        "file",
        [
            _path("dissimilarity_matrix", "Square matrix of pairwise dissimilarities."),
            {
                "name": "min_cluster_size",
                "kind": "integer",
                "description": "Smallest group size the clustering may produce.",
                "default": 5,
            },
            {
                "name": "significance",
                "kind": "float",
                "description": "Significance threshold for the reported p-values.",
                "default": 0.05,
            },
        ],
    ),
    _app(
        "netMUG",
        "r",
        "Network-guided multi-view clustering of samples; clusters are downloadable.",
        "Selects features across two data views via canonical correlations with an "
        "extraneous variable, builds individual-specific networks from the selected "
        "features, and clusters samples on network edge strength. The resulting "
        "cluster assignments are written to a downloadable file.",
        ["networks", "clustering", "multi-view"],
        "run_netmug",
        "file",
        [
            _path("view1", "First data view, samples in rows and features in columns."),
            _path("view2", "Second data view, aligned to the same samples."),
            _path("extraneous", "Extraneous variable used to guide feature selection."),
            {
                "name": "sparsity",
                "kind": "float",
                "description": "Penalty controlling how many features are kept.",
                "default": 0.1,
            },
        ],
    ),
    _app(
        "GMIC",
        "r",
        "Graph-based integration of data modalities for supervised classification.",
        "Builds individual-specific graphs per data modality, scores similarity "
        "between individuals at node and edge level, averages the similarity "
        "matrices, and trains a support vector machine on the integrated matrix. "
        "Predicted group labels for new samples are written to a downloadable file.",
        ["networks", "classification", "multi-view"],
        "run_gmic",
        "file",
        [
            _path("modality1", "First raw data modality, samples in rows."),
            _path("modality2", "Second raw data modality, samples in rows."),
            _path("labels", "Known group labels for the training samples."),
            {
                "name": "folds",
                "kind": "integer",
                "description": "Cross-validation folds used while training.",
                "default": 5,
            },
        ],
    ),
    _app(
        "2D PCA",
        "python",
        "Projects a dataset onto its first two principal components.",
        "Principal component analysis reduces the number of variables while "
        "keeping as much variance as possible. This variant renders the first two "
        "components as an interactive scatter plot embedded in the page.",
        ["dimension-reduction", "visualisation"],
        "run",
        "html",
        [
            _path("data", "Tabular dataset; one sample per row."),
            {
                "name": "scale",
                "kind": "boolean",
                "description": "Standardise columns before the decomposition.",
                "default": True,
            },
        ],
    ),
    _app(
        "3D PCA",
        "python",
        "Projects a dataset onto its first three principal components.",
        "Principal component analysis reduces the number of variables while "
        "keeping as much variance as possible. This variant renders the first "
        "three components as a rotatable 3-D plot embedded in the page.",
        ["dimension-reduction", "visualisation"],
        "run",
        "html",
        [
            _path("data", "Tabular dataset; one sample per row."),
            {
                "name": "scale",
                "kind": "boolean",
                "description": "Standardise columns before the decomposition.",
                "default": True,
            },
        ],
    ),
    _app(
        "PCA loadings",
        "python",
        "Shows how strongly each original variable drives each principal component.",
        "Computes the eigenvectors of the covariance matrix, scales them by the "
        "square root of their eigenvalues, and renders the resulting loadings so "
        "the contribution of every original variable to every retained component "
        "can be inspected.",
        ["dimension-reduction", "visualisation"],
        "run",
        "html",
        [
            _path("data", "Tabular dataset; one sample per row."),
            {
                "name": "components",
                "kind": "integer",
                "description": "Number of components whose loadings are shown.",
                "default": 2,
            },
        ],
    ),
    _app(
        "2D tSNE",
        "python",
        "Two-dimensional embedding of high-dimensional data for visual exploration.",
        "t-distributed stochastic neighbour embedding converts pairwise "
        "similarities into joint probabilities and minimises the divergence "
        "between the high-dimensional data and its low-dimensional embedding. "
        "The embedding is rendered as an interactive plot.",
        ["dimension-reduction", "visualisation"],
        "run",
        "html",
        [
            _path("data", "Tabular dataset; one sample per row."),
            {
                "name": "perplexity",
                "kind": "float",
                "description": "Effective number of neighbours per point.",
                "default": 30.0,
            },
            {
                "name": "iterations",
                "kind": "integer",
                "description": "Optimisation steps to run.",
                "default": 1000,
            },
        ],
    ),
    _app(
        "2D UMAP",
        "python",
        "Uniform manifold approximation and projection to two dimensions.",
        "A non-linear dimension reduction that preserves local neighbourhood "
        "structure; useful both for visualisation and as a general embedding. "
        "The two-dimensional projection is rendered as an interactive plot.",
        ["dimension-reduction", "visualisation"],
        "run",
        "html",
        [
            _path("data", "Tabular dataset; one sample per row."),
            {
                "name": "neighbors",
                "kind": "integer",
                "description": "Neighbourhood size balancing local and global structure.",
                "default": 15,
            },
            {
                "name": "min_dist",
                "kind": "float",
                "description": "Minimum spacing between embedded points.",
                "default": 0.1,
            },
        ],
    ),
    _app(
        "Scatter Matrix",
        "python",
        "Grid of scatter plots over every pair of selected variables.",
        "Draws a matrix of scatter plots, one per pair of variables, so many "
        "bivariate relationships can be scanned in a single chart embedded in "
        "the page.",
        ["visualisation"],
        "run",
        "html",
        [_path("data", "Tabular dataset; one sample per row.")],
    ),
    _app(
        "Scatter Marginals",
        "python",
        "Joint scatter plot of two variables with their marginal histograms.",
        "Plots the joint distribution of two chosen variables and attaches the "
        "marginal distribution of each along the axes.",
        ["visualisation"],
        "run",
        "html",
        [
            _path("data", "Tabular dataset; one sample per row."),
            {"name": "x", "kind": "string", "description": "Column plotted on the x axis."},
            {"name": "y", "kind": "string", "description": "Column plotted on the y axis."},
        ],
    ),
    _app(
        "ROC binary",
        "python",
        "Receiver operating characteristic curve for a binary classifier.",
        "Plots the true-positive rate against the false-positive rate across "
        "score thresholds, separating signal from noise for a two-class problem.",
        ["evaluation", "classification"],
        "run",
        "html",
        [
            _path("predictions", "Predicted scores alongside true labels."),
            {
                "name": "positive_label",
                "kind": "string",
                "description": "Which label counts as the positive class.",
                "default": "1",
            },
        ],
    ),
    _app(
        "ROC multiclass",
        "python",
        "One-vs-rest receiver operating characteristic curves for several classes.",
        "Draws one ROC curve per class under a one-vs-rest reduction so "
        "multiclass scores can be assessed with the same threshold sweep used in "
        "the binary case.",
        ["evaluation", "classification"],
        "run",
        "html",
        [_path("predictions", "Predicted per-class scores alongside true labels.")],
    ),
    _app(
        "PR binary",
        "python",
        "Precision-recall curve for a binary classifier.",
        "Plots precision against recall across thresholds; the trade-off is most "
        "informative when the classes are strongly imbalanced.",
        ["evaluation", "classification"],
        "run",
        "html",
        [
            _path("predictions", "Predicted scores alongside true labels."),
            {
                "name": "positive_label",
                "kind": "string",
                "description": "Which label counts as the positive class.",
                "default": "1",
            },
        ],
    ),
    _app(
        "PR multiclass",
        "python",
        "One-vs-rest precision-recall curves for several classes.",
        "Draws one precision-recall curve per class under a one-vs-rest "
        "reduction, for problems where per-class retrieval quality matters.",
        ["evaluation", "classification"],
        "run",
        "html",
        [_path("predictions", "Predicted per-class scores alongside true labels.")],
    ),
    _app(
        "LR preliminary plots",
        "python",
        "Diagnostic plots for a simple linear regression between two variables.",
        "Fits a linear model predicting a dependent variable from an independent "
        "one and renders the fit together with residual diagnostics, as a quick "
        "check before any deeper regression analysis.",
        ["regression", "visualisation"],
        "run",
        "html",
        [
            _path("data", "Tabular dataset; one sample per row."),
            {"name": "dependent", "kind": "string", "description": "Column being predicted."},
            {"name": "independent", "kind": "string", "description": "Column used as the predictor."},
        ],
    ),
    _app(
        "Demo",
        "r",
        "Minimal application demonstrating arbitrary HTML output.",
        "Returns a small HTML fragment that the page embeds directly. Useful as "
        "a smoke test for the runner and as a template for new applications.",
        ["demo"],
        "demo_output",
        "html",
        [],
        source={"inline": DEMO_SOURCE},
    ),
]


def seed_manifests() -> list[ApplicationManifest]:
    """Validate and return the full corpus. A corpus defect is a programming error."""
    manifests = []
    for doc in SEED_DOCUMENTS:
        result = validate_manifest(doc)
        if isinstance(result, ValidationReport):
            raise AssertionError(f"seed manifest {doc.get('name')!r} is invalid:\n{result}")
        manifests.append(result)
    return manifests
