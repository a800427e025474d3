"""
run: one layer from F3DT files to an F3DT file
"""
import argparse

import structlog

from f3dc.cli import EXIT_OK, threads_arg, transform_set_arg
from f3dc.models.geometry import LayerSpec, WeightBank
from f3dc.models.tensor import ChannelVolume
from f3dc.services.engine_service import deconv3d_f3dc, deconv3d_f3dc_quant
from f3dc.services.oracle_service import deconv3d_zim
from f3dc.services.tensor_io import read_tensor, write_tensor

logger = structlog.get_logger()


def cmd_run(args: argparse.Namespace) -> int:
    x = ChannelVolume(read_tensor(args.input))
    w = WeightBank(read_tensor(args.weights))
    d, _, _ = x.dims
    layer = LayerSpec.build(name=args.name, c_in=w.c_in, c_out=w.c_out, i=d, k=w.k, s=args.s, p=args.p)

    if args.oracle:
        y = deconv3d_zim(x, w, layer.geom)
    else:
        ts = transform_set_arg(args.transform_set)
        workers = threads_arg(args.threads)
        path = deconv3d_f3dc_quant if args.quant else deconv3d_f3dc
        y = path(x, w, layer, ts, workers=workers)

    write_tensor(args.output, y.data)
    logger.info("run_completed", layer=layer.name, output=args.output, oracle=args.oracle, quant=args.quant)
    return EXIT_OK


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="deconvolve one layer stored in F3DT files")
    parser.add_argument("--input", required=True, help="rank-4 (c, d, h, w) input tensor")
    parser.add_argument("--weights", required=True, help="rank-5 (c_out, c_in, k, k, k) weights")
    parser.add_argument("--output", required=True, help="output tensor path")
    parser.add_argument("--s", type=int, default=2, help="stride")
    parser.add_argument("--p", type=int, default=1, help="padding")
    parser.add_argument("--name", default="run")
    parser.add_argument("--threads", type=int)
    parser.add_argument("--transform-set", help="transform set file (default: built-in)")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--oracle", action="store_true", help="use the zero-insertion oracle")
    mode.add_argument("--quant", action="store_true", help="use the integer-only path")
    parser.set_defaults(handler=cmd_run)
