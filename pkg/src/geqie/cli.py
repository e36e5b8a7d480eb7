"""The ``geqie`` command line: encode, simulate, retrieve, benchmark, verify,
and the ``cosmic`` subcommands for the volumetric pipeline.

Exit codes: 0 success, 1 internal error, 2 bad input, 3 capacity exceeded.
The qubit cap defaults to 12 and can be overridden per command with
``--max-qubits`` or globally with the ``GEQIE_MAX_QUBITS`` environment
variable.
"""

from __future__ import annotations

import json
import os
import sys

import click
import numpy as np

from . import benchmark as bench
from . import cosmicweb, encodings, fileformats, netpbm
from .errors import CapacityError, DomainError, FormatError, GeqieError
from .model import completion_unitary, verify_model, write_unitary, write_unitary_json
from .simcore import (
    DENSITY_MAX_QUBITS,
    NoiseMode,
    NoiseSpec,
    StateVector,
    measure_probabilities,
)

DEFAULT_MAX_QUBITS = 12


def _effective_cap(option_value) -> int:
    if option_value is not None:
        return int(option_value)
    env = os.environ.get("GEQIE_MAX_QUBITS")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DomainError(f"GEQIE_MAX_QUBITS is not an integer: {env!r}") from None
    return DEFAULT_MAX_QUBITS


def _parse_dims(text) -> tuple:
    try:
        dims = tuple(int(part) for part in text.lower().split("x"))
    except ValueError:
        raise DomainError(f"bad dims {text!r}; expected e.g. 4x4 or 16x16x16") from None
    if not dims or any(d < 1 for d in dims):
        raise DomainError(f"bad dims {text!r}; extents must be >= 1")
    return dims


@click.group()
def cli():
    """Quantum image encoding engine."""


# -- encode -------------------------------------------------------------------

@cli.command()
@click.option("--method", "-m", required=True, help="Encoding method name.")
@click.option("--input", "-i", "input_path", required=True,
              type=click.Path(exists=True), help="PGM/PPM image.")
@click.option("--output-state", type=click.Path(), help="Statevector file (GQS1).")
@click.option("--output-unitary", type=click.Path(),
              help="State-preparation unitary (GQU1; .json for n <= 4).")
@click.option("--max-qubits", type=int, default=None, help="Qubit budget cap.")
def encode(method, input_path, output_state, output_unitary, max_qubits):
    """Encode an image file into a quantum state."""
    if not output_state and not output_unitary:
        raise DomainError("nothing to do: pass --output-state and/or --output-unitary")
    image = netpbm.read_image(input_path)
    state = encodings.encode(method, image, max_qubits=_effective_cap(max_qubits))
    if output_state:
        fileformats.write_state(output_state, state)
        click.echo(f"wrote {state.n_qubits}-qubit state to {output_state}")
    if output_unitary:
        unitary = completion_unitary(state)
        if str(output_unitary).endswith(".json"):
            write_unitary_json(output_unitary, unitary)
        else:
            write_unitary(output_unitary, unitary)
        click.echo(f"wrote completion unitary to {output_unitary}")


# -- simulate -----------------------------------------------------------------

@cli.command()
@click.option("--state", "state_path", type=click.Path(exists=True),
              help="Statevector file from `geqie encode`.")
@click.option("--method", "-m", help="Encode --input on the fly instead.")
@click.option("--input", "-i", "input_path", type=click.Path(exists=True))
@click.option("--shots", type=int, default=bench.DEFAULT_SHOTS, show_default=True,
              help="Measurement shots; 0 emits exact probabilities.")
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True,
              help="Depolarizing error probability.")
@click.option("--noise-mode", type=click.Choice([m.value for m in NoiseMode]),
              default=NoiseMode.TRAJECTORIES.value, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output-counts", required=True, type=click.Path())
@click.option("--max-qubits", type=int, default=None)
def simulate(state_path, method, input_path, shots, lam, noise_mode, seed,
             output_counts, max_qubits):
    """Measure a state (optionally under noise) and write a counts JSON."""
    if state_path:
        state = fileformats.read_state(state_path)
    elif method and input_path:
        image = netpbm.read_image(input_path)
        state = encodings.encode(method, image, max_qubits=_effective_cap(max_qubits))
    else:
        raise DomainError("pass --state, or --method with --input")
    mode = NoiseMode.parse(noise_mode)
    if lam > 0 and mode is not NoiseMode.TRAJECTORIES \
            and state.n_qubits > DENSITY_MAX_QUBITS:
        raise CapacityError(state.n_qubits, DENSITY_MAX_QUBITS,
                            what="exact-noise qubits (use trajectories mode)")
    noise = NoiseSpec(lam, mode) if lam > 0 else None
    weights = encodings.measurement_weights(state, shots, noise=noise, seed=seed)
    if shots == 0:
        fileformats.write_probabilities(output_counts, weights, state.n_qubits)
    else:
        histogram = _weights_to_histogram(weights, state.n_qubits, shots)
        fileformats.write_counts(output_counts, histogram)
    click.echo(f"wrote counts to {output_counts}")


def _weights_to_histogram(weights, n_qubits, shots):
    from .simcore import CountsHistogram

    return CountsHistogram.from_vector(weights.astype(np.int64), n_qubits)


# -- retrieve -------------------------------------------------------------------

@cli.command()
@click.option("--method", "-m", required=True)
@click.option("--counts", "counts_path", required=True, type=click.Path(exists=True))
@click.option("--dims", required=True, help="Image extents, e.g. 4x4 or 16x16x16.")
@click.option("--output-image", type=click.Path(), help="PGM/PPM output (2-D).")
@click.option("--output-grid", type=click.Path(), help="Voxel grid output (3-D).")
def retrieve(method, counts_path, dims, output_image, output_grid):
    """Decode a counts file back into an image or voxel grid."""
    dims = _parse_dims(dims)
    weights, n_qubits, _shots = fileformats.read_counts(counts_path)
    budget = encodings.qubit_budget(method, dims)
    if n_qubits != budget:
        raise DomainError(
            f"counts file has {n_qubits} qubits but {method} on "
            f"{'x'.join(map(str, dims))} uses {budget}"
        )
    image = encodings.retrieve(method, weights, dims)
    if len(dims) == 2:
        if not output_image:
            raise DomainError("2-D retrieval needs --output-image")
        netpbm.write_image(output_image, image)
        click.echo(f"wrote image to {output_image}")
    else:
        if not output_grid:
            raise DomainError("volumetric retrieval needs --output-grid")
        fileformats.write_grid(output_grid, cosmicweb.VoxelGrid(image.values[..., 0]))
        click.echo(f"wrote grid to {output_grid}")


# -- verify ---------------------------------------------------------------------

@cli.command()
@click.option("--method", "-m", required=True)
@click.option("--dims", default="4x4", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def verify(method, dims, seed):
    """Run the automated model checks for one method."""
    model = encodings.build_model(method, _parse_dims(dims))
    report = verify_model(model, seed=seed)
    click.echo(report.summary())
    if not report.passed:
        sys.exit(1)


# -- benchmark --------------------------------------------------------------------

@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="Benchmark config JSON; flags below override nothing if given.")
@click.option("--methods", help="Comma-separated method names.")
@click.option("--sizes", help="Comma-separated square sizes, e.g. 2,4,8.")
@click.option("--images-per-size", type=int, default=None)
@click.option("--lambdas", help="Comma-separated noise levels.")
@click.option("--shots", type=int, default=None)
@click.option("--max-qubits", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--output-dir", required=True, type=click.Path())
def benchmark(config_path, methods, sizes, images_per_size, lambdas, shots,
              max_qubits, seed, workers, output_dir):
    """Run the benchmark matrix and write records/summary/plotdata CSVs."""
    if config_path:
        config = bench.BenchmarkConfig.from_json(config_path)
    else:
        kwargs = {}
        if methods:
            kwargs["methods"] = tuple(m.strip() for m in methods.split(","))
        if sizes:
            kwargs["sizes"] = tuple(int(s) for s in sizes.split(","))
        if images_per_size is not None:
            kwargs["images_per_size"] = images_per_size
        if lambdas:
            kwargs["lambdas"] = tuple(float(v) for v in lambdas.split(","))
        if shots is not None:
            kwargs["shots"] = shots
        kwargs["max_qubits"] = _effective_cap(max_qubits)
        if seed is not None:
            kwargs["seed"] = seed
        config = bench.BenchmarkConfig(**kwargs)
    os.makedirs(output_dir, exist_ok=True)
    records = bench.run(config, workers=workers)
    summary = bench.summarize(records)
    bench.write_records_csv(os.path.join(output_dir, "records.csv"), records)
    bench.write_summary_csv(os.path.join(output_dir, "summary.csv"), summary)
    bench.write_plotdata_csv(os.path.join(output_dir, "plotdata.csv"), summary)
    skipped = sum(1 for r in records if r.skipped)
    click.echo(f"{len(records)} records ({skipped} skipped) -> {output_dir}")


# -- cosmic -------------------------------------------------------------------------

@cli.group()
def cosmic():
    """Volumetric (dark-matter density) pipeline."""


@cosmic.command()
@click.option("--points", "points_path", type=click.Path(exists=True),
              help="ASCII x y z file or GQP1 binary.")
@click.option("--synthetic", is_flag=True, help="Use the bundled synthetic cloud.")
@click.option("--n-points", type=int, default=100_000, show_default=True,
              help="Synthetic cloud size.")
@click.option("--cloud-seed", type=int, default=20_206, show_default=True)
@click.option("--box-size", type=float, default=None,
              help="Box size; defaults to the <points>.json sidecar.")
@click.option("--resolution", type=int, default=16, show_default=True)
@click.option("--output", "output_path", required=True, type=click.Path())
def voxelize(points_path, synthetic, n_points, cloud_seed, box_size, resolution,
             output_path):
    """Bin a point cloud into a density grid (GQV1)."""
    if synthetic:
        cloud = cosmicweb.synthetic_cloud(n_points=n_points, seed=cloud_seed)
    elif points_path:
        cloud = fileformats.read_points(points_path, box_size=box_size)
    else:
        raise DomainError("pass --points or --synthetic")
    grid = cosmicweb.voxelize(cloud, resolution)
    fileformats.write_grid(output_path, grid)
    click.echo(f"voxelized {cloud.count} points into {resolution}^3 -> {output_path}")


@cosmic.command()
@click.option("--grid", "grid_path", required=True, type=click.Path(exists=True))
@click.option("--scheme", required=True,
              type=click.Choice(sorted(cosmicweb.SCHEMES)))
@click.option("--output", "output_path", required=True, type=click.Path())
def normalize(grid_path, scheme, output_path):
    """Normalize a raw density grid into [0, 1)."""
    grid = fileformats.read_grid(grid_path)
    normalized = cosmicweb.normalize(grid, cosmicweb.scheme_by_name(scheme))
    fileformats.write_grid(output_path, normalized)
    click.echo(
        f"normalized with {scheme} (scale {normalized.normalization.scale:g}, "
        f"sigma {cosmicweb.spread_sigma(normalized):.4f}) -> {output_path}"
    )


@cosmic.command()
@click.option("--grid", "grid_path", required=True, type=click.Path(exists=True))
@click.option("--bins", type=int, default=32, show_default=True)
@click.option("--output", "output_path", type=click.Path(),
              help="CSV output; default prints to stdout.")
def histogram(grid_path, bins, output_path):
    """Histogram of the voxel values."""
    grid = fileformats.read_grid(grid_path)
    edges, counts = cosmicweb.histogram(grid, bins)
    lines = ["bin_left,bin_right,count"]
    lines += [
        f"{float(edges[i])!r},{float(edges[i + 1])!r},{int(c)}"
        for i, c in enumerate(counts)
    ]
    text = "\n".join(lines) + "\n"
    if output_path:
        with open(output_path, "w", encoding="utf-8") as handle:
            handle.write(text)
        click.echo(f"wrote histogram to {output_path}")
    else:
        click.echo(text, nl=False)


@cosmic.command()
@click.option("--grid", "grid_path", type=click.Path(exists=True),
              help="Raw density grid; omit with --synthetic.")
@click.option("--synthetic", is_flag=True, help="Bundled cloud at 16^3.")
@click.option("--scheme", default="e-median", show_default=True,
              type=click.Choice(sorted(cosmicweb.SCHEMES)))
@click.option("--shots", type=int, default=1 << 20, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--max-qubits", type=int, default=None)
@click.option("--report", "report_path", type=click.Path(),
              help="Write the JSON report here as well.")
def roundtrip(grid_path, synthetic, scheme, shots, seed, max_qubits, report_path):
    """Encode a density grid with mfrqi, sample, retrieve, and score."""
    if synthetic:
        grid = cosmicweb.voxelize(cosmicweb.synthetic_cloud(), 16)
    elif grid_path:
        grid = fileformats.read_grid(grid_path)
    else:
        raise DomainError("pass --grid or --synthetic")
    cap = _effective_cap(max_qubits)
    result = cosmicweb.cosmic_roundtrip(
        grid, cosmicweb.scheme_by_name(scheme), shots, seed=seed,
        max_qubits=max(cap, 13) if max_qubits is None else cap,
    )
    click.echo(f"pcc_normalized   {result.pcc_normalized:.6f}")
    click.echo(f"pcc_denormalized {result.pcc_denormalized:.6f}")
    if report_path:
        with open(report_path, "w", encoding="utf-8") as handle:
            json.dump({
                "scheme": scheme,
                "shots": result.shots,
                "seed": result.seed,
                "pcc_normalized": result.pcc_normalized,
                "pcc_denormalized": result.pcc_denormalized,
            }, handle, indent=2)
        click.echo(f"wrote report to {report_path}")


# -- entry point -------------------------------------------------------------------

def main(argv=None) -> int:
    """Invoke the CLI, mapping package errors onto documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except (DomainError, FormatError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except CapacityError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 2
    except click.ClickException as exc:
        exc.show()
        return 2
    except click.exceptions.Abort:
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    except GeqieError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


def entry() -> None:
    sys.exit(main())
