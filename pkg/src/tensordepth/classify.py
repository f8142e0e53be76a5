"""Maximum-depth classification and the randomised recognition-rate harness.

A query is assigned to the class in which it is deepest; exact depth ties
break to the lowest class index and are counted.  The experiment harness
fixes one test draw per class, then for every training size and round draws
fresh training members from the remainder, classifies every test member and
aggregates the recognition rate across rounds.  All randomness flows from
the protocol seed, so a report is reproducible bit for bit.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from . import tensor_pca
from .errors import DepthError, ProtocolError, RankDeficiencyError
from .locscale import LocationScale
from .tensor import DenseTensor, TensorSample, reshape
from .tensor_depth import TpdConfig, tpd_outlyingness
from .vector_depth import (
    SearchBudget,
    VectorSample,
    approx_outlyingness_medmad,
    depth_from_outlyingness,
    principal_basis,
    rayleigh_outlyingness,
)

__all__ = [
    "DEPTH_KINDS",
    "PREPROCESSING_KINDS",
    "LabeledDataset",
    "MaxDepthClassifier",
    "max_depth_classify",
    "ExperimentProtocol",
    "RoundResult",
    "SizeResult",
    "ExperimentReport",
    "run_experiment",
]

log = logging.getLogger(__name__)

DEPTH_KINDS = ("pd", "rpd", "tpd")
PREPROCESSING_KINDS = ("none", "vector-pca", "tensor-pca")

# Fixed flattening convention, recorded in every report.
RESHAPE_ORDER = "row-major (last index fastest)"


@dataclass(frozen=True)
class LabeledDataset:
    """q >= 2 same-shape tensor samples, one per class."""

    labels: tuple[str, ...]
    classes: tuple[TensorSample, ...]

    def __post_init__(self):
        if len(self.labels) != len(self.classes):
            raise ProtocolError("labels and classes differ in length")
        if len(self.classes) < 2:
            raise ProtocolError("need at least two classes")
        shape = self.classes[0].shape
        for label, cls in zip(self.labels, self.classes):
            if cls.shape != shape:
                raise ProtocolError(
                    f"class {label!r} has shape {cls.shape}, expected {shape}"
                )
            if len(cls) < 2:
                raise ProtocolError(f"class {label!r} has fewer than 2 members")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.classes[0].shape

    def class_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)


def _reshaped(sample: TensorSample, shape) -> TensorSample:
    if shape is None:
        return sample
    return TensorSample.from_array(
        sample.stack.reshape((len(sample),) + tuple(shape))
    )


class MaxDepthClassifier:
    """Depth-maximising classifier over per-class samples.

    ``depth`` is one of ``pd`` (vector projection depth on the flattened
    members, with the configured location/scale), ``rpd`` (vector depth with
    the exact mean/std form) or ``tpd`` (tensor depth on the members, after
    an optional reshape).  Preprocessing is fitted per class on that class's
    members only: ``vector-pca`` projects flattened members onto their
    nonzero subspace and ``tensor-pca`` does the mode-wise analogue.  For
    vector depths both options coincide and are accepted interchangeably.
    """

    def __init__(
        self,
        depth: str = "tpd",
        kind: LocationScale = LocationScale.MEAN_STD,
        tpd_config: TpdConfig | None = None,
        preprocessing: str = "none",
        shape=None,
        budget: SearchBudget | None = None,
    ):
        if depth not in DEPTH_KINDS:
            raise ValueError(f"depth must be one of {DEPTH_KINDS}, got {depth!r}")
        if preprocessing not in PREPROCESSING_KINDS:
            raise ValueError(
                f"preprocessing must be one of {PREPROCESSING_KINDS}, "
                f"got {preprocessing!r}"
            )
        if depth == "tpd" and preprocessing == "vector-pca":
            raise ValueError("vector-pca applies to vector depths only")
        self.depth = depth
        self.kind = LocationScale.MEAN_STD if depth == "rpd" else kind
        self.tpd_config = tpd_config or TpdConfig(kind=self.kind)
        self.preprocessing = preprocessing
        self.shape = None if shape is None else tuple(int(d) for d in shape)
        self.budget = budget or SearchBudget()
        self.ties_ = 0

    def fit(self, dataset: LabeledDataset) -> "MaxDepthClassifier":
        self.labels_ = dataset.labels
        self.ties_ = 0
        if self.depth == "tpd":
            self._fit_tensor(dataset)
        else:
            self._fit_vector(dataset)
        return self

    def _fit_tensor(self, dataset: LabeledDataset):
        self._models = []
        self._samples = []
        for label, cls in zip(dataset.labels, dataset.classes):
            sample = _reshaped(cls, self.shape)
            if sample.order < 2:
                raise ValueError(
                    "tpd needs order >= 2 members; pass shape= to reshape "
                    "vector data"
                )
            model = None
            if self.preprocessing == "tensor-pca":
                with _class_context(label):
                    model, sample = tensor_pca.fit_transform(sample)
            self._models.append(model)
            self._samples.append(sample)

    def _fit_vector(self, dataset: LabeledDataset):
        self._bases = []
        self._samples = []
        for label, cls in zip(dataset.labels, dataset.classes):
            points = cls.vectorized()
            basis = None
            with _class_context(label):
                vs = VectorSample(points)
                if self.preprocessing != "none":
                    basis = principal_basis(vs)
                    vs = VectorSample(points @ basis)
            self._bases.append(basis)
            self._samples.append(vs)

    def class_depths(self, x: DenseTensor, rng=None) -> np.ndarray:
        """Depth of the query in every class, in label order."""
        depths = np.empty(len(self.labels_))
        for j, label in enumerate(self.labels_):
            with _class_context(label):
                depths[j] = self._one_depth(j, x, rng)
        return depths

    def _one_depth(self, j: int, x: DenseTensor, rng) -> float:
        if self.depth == "tpd":
            query = x if self.shape is None else reshape(x, self.shape)
            if self._models[j] is not None:
                query = tensor_pca.transform(self._models[j], query)
            return tpd_outlyingness(query, self._samples[j], self.tpd_config, rng).depth
        vec = x.vectorize()
        if self._bases[j] is not None:
            vec = self._bases[j].T @ vec
        if self.kind is LocationScale.MEAN_STD:
            value = rayleigh_outlyingness(vec, self._samples[j]).value
        else:
            value = approx_outlyingness_medmad(
                vec, self._samples[j], self.budget, rng=rng
            ).value
        return depth_from_outlyingness(value)

    def predict(self, x: DenseTensor, rng=None) -> int:
        """Index of the deepest class; exact ties go to the lowest index."""
        depths = self.class_depths(x, rng)
        best = int(np.argmax(depths))
        if np.count_nonzero(depths == depths[best]) > 1:
            self.ties_ += 1
            log.debug(
                "depth tie at %.12g between classes %s; keeping %r",
                depths[best],
                [self.labels_[i] for i in np.flatnonzero(depths == depths[best])],
                self.labels_[best],
            )
        return best


class _class_context:
    """Re-raise depth errors with the offending class label attached."""

    def __init__(self, label: str):
        self.label = label

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is None or not isinstance(exc, DepthError):
            return False
        message = f"class {self.label!r}: {exc}"
        if isinstance(exc, RankDeficiencyError):
            raise RankDeficiencyError(message, deficient=exc.deficient) from exc
        raise type(exc)(message) from exc


def max_depth_classify(
    x: DenseTensor,
    dataset: LabeledDataset,
    depth: str = "tpd",
    kind: LocationScale = LocationScale.MEAN_STD,
    tpd_config: TpdConfig | None = None,
    preprocessing: str = "none",
    shape=None,
    rng=None,
) -> int:
    """One-shot max-depth classification; returns the class index."""
    clf = MaxDepthClassifier(
        depth=depth,
        kind=kind,
        tpd_config=tpd_config,
        preprocessing=preprocessing,
        shape=shape,
    ).fit(dataset)
    return clf.predict(x, rng)


@dataclass(frozen=True)
class ExperimentProtocol:
    """Randomised train/test protocol: one fixed test draw per class, then
    per (training size, round) training draws from the remainder."""

    test_per_class: int
    training_sizes: tuple[int, ...]
    rounds: int = 10
    seed: int = 0
    depth: str = "rpd"
    kind: LocationScale = LocationScale.MEAN_STD
    preprocessing: str = "none"
    shape: tuple[int, ...] | None = None
    restarts: int = 1
    tol: float = 1e-9
    max_iter: int = 200

    def __post_init__(self):
        object.__setattr__(self, "training_sizes", tuple(int(s) for s in self.training_sizes))
        if self.shape is not None:
            object.__setattr__(self, "shape", tuple(int(d) for d in self.shape))

    def validate(self, dataset: LabeledDataset | None = None):
        if self.test_per_class < 1:
            raise ProtocolError("test_per_class must be at least 1")
        if self.rounds < 1:
            raise ProtocolError("rounds must be at least 1")
        if not self.training_sizes or min(self.training_sizes) < 1:
            raise ProtocolError("training_sizes must be positive")
        if self.seed < 0:
            raise ProtocolError("seed must be non-negative")
        if self.depth not in DEPTH_KINDS:
            raise ProtocolError(f"depth must be one of {DEPTH_KINDS}")
        if self.preprocessing not in PREPROCESSING_KINDS:
            raise ProtocolError(f"preprocessing must be one of {PREPROCESSING_KINDS}")
        if dataset is not None:
            budget = min(dataset.class_sizes()) - self.test_per_class
            if max(self.training_sizes) > budget:
                raise ProtocolError(
                    f"largest training size {max(self.training_sizes)} exceeds "
                    f"the {budget} members left per class after the test draw"
                )

    def tpd_config(self) -> TpdConfig:
        return TpdConfig(
            kind=self.kind,
            restarts=self.restarts,
            tol=self.tol,
            max_iter=self.max_iter,
            seed=self.seed,
        )

    def to_dict(self) -> dict:
        return {
            "test_per_class": self.test_per_class,
            "training_sizes": list(self.training_sizes),
            "rounds": self.rounds,
            "seed": self.seed,
            "depth": self.depth,
            "location_scale": self.kind.value,
            "preprocessing": self.preprocessing,
            "shape": None if self.shape is None else list(self.shape),
            "restarts": self.restarts,
            "tol": self.tol,
            "max_iter": self.max_iter,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentProtocol":
        known = {
            "test_per_class",
            "training_sizes",
            "rounds",
            "seed",
            "depth",
            "location_scale",
            "preprocessing",
            "shape",
            "restarts",
            "tol",
            "max_iter",
        }
        unknown = set(doc) - known
        if unknown:
            raise ProtocolError(f"unknown protocol fields: {sorted(unknown)}")
        kwargs = dict(doc)
        if "location_scale" in kwargs:
            kwargs["kind"] = LocationScale.parse(kwargs.pop("location_scale"))
        if kwargs.get("shape") is not None:
            kwargs["shape"] = tuple(kwargs["shape"])
        try:
            return cls(**kwargs)
        except TypeError as err:
            raise ProtocolError(f"bad protocol document: {err}") from err


@dataclass(frozen=True)
class RoundResult:
    round: int
    rate: float
    correct_per_class: tuple[int, ...]


@dataclass(frozen=True)
class SizeResult:
    training_size: int
    mean: float
    min: float
    max: float
    variance: float
    rounds: tuple[RoundResult, ...]


@dataclass(frozen=True)
class ExperimentReport:
    """Per-size recognition statistics plus everything needed to re-run."""

    sizes: tuple[SizeResult, ...]
    protocol: ExperimentProtocol
    ties: int
    library_version: str
    reshape_order: str = RESHAPE_ORDER
    extra: dict = field(default_factory=dict)


def _library_version() -> str:
    from . import __version__

    return __version__


def _default_factory(protocol: ExperimentProtocol):
    def build(train: LabeledDataset, rng):
        clf = MaxDepthClassifier(
            depth=protocol.depth,
            kind=protocol.kind,
            tpd_config=protocol.tpd_config(),
            preprocessing=protocol.preprocessing,
            shape=protocol.shape,
        ).fit(train)
        return clf

    return build


def run_experiment(
    dataset: LabeledDataset,
    protocol: ExperimentProtocol,
    classifier_factory=None,
    extra_metadata: dict | None = None,
) -> ExperimentReport:
    """Run the full protocol and aggregate recognition rates.

    ``classifier_factory(train, rng)`` may replace the max-depth classifier;
    it must return an object with ``predict(x, rng) -> class index`` (a bare
    callable ``f(x)`` is also accepted).  The test draw uses the sub-seed
    (seed, 0) and each (size, round) pair the sub-seed (seed, 1, size,
    round), so results do not depend on evaluation order.
    """
    protocol.validate(dataset)
    if classifier_factory is None:
        classifier_factory = _default_factory(protocol)

    q = dataset.n_classes
    p = protocol.test_per_class
    rng_test = np.random.default_rng(np.random.SeedSequence([protocol.seed, 0]))
    test_sets: list[np.ndarray] = []
    pools: list[np.ndarray] = []
    for cls in dataset.classes:
        perm = rng_test.permutation(len(cls))
        test_sets.append(perm[:p])
        pools.append(perm[p:])

    ties = 0
    size_results = []
    for n_k in protocol.training_sizes:
        round_results = []
        for t in range(protocol.rounds):
            rng = np.random.default_rng(
                np.random.SeedSequence([protocol.seed, 1, n_k, t])
            )
            train = LabeledDataset(
                labels=dataset.labels,
                classes=tuple(
                    TensorSample.from_array(
                        cls.stack[np.sort(rng.choice(pool, size=n_k, replace=False))]
                    )
                    for cls, pool in zip(dataset.classes, pools)
                ),
            )
            clf = classifier_factory(train, rng)
            if hasattr(clf, "predict"):
                predict = lambda x: clf.predict(x, rng)  # noqa: B023
            else:
                predict = clf
            correct = [0] * q
            for j, cls in enumerate(dataset.classes):
                for i in test_sets[j]:
                    if predict(DenseTensor(cls.stack[i])) == j:
                        correct[j] += 1
            ties += getattr(clf, "ties_", 0)
            rate = sum(correct) / (q * p)
            round_results.append(
                RoundResult(round=t, rate=rate, correct_per_class=tuple(correct))
            )
        rates = np.array([r.rate for r in round_results])
        size_results.append(
            SizeResult(
                training_size=n_k,
                mean=float(rates.mean()),
                min=float(rates.min()),
                max=float(rates.max()),
                variance=float(rates.var()),
                rounds=tuple(round_results),
            )
        )
    return ExperimentReport(
        sizes=tuple(size_results),
        protocol=protocol,
        ties=ties,
        library_version=_library_version(),
        extra=dict(extra_metadata or {}),
    )
