"""3-(P̄P(2-(UP̄S))) 运动学与工作空间分析 - 命令行入口

退出码: 0 成功,1 参数 / 配置错误,2 运行期或数值错误 (含自检失败)
"""
import argparse
import logging
import sys
from typing import List, Optional

from config import RunConfig, settings
from errors import ConfigError
import commands

# 配置日志
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=getattr(logging, settings.LOG_LEVEL, logging.INFO),
)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2


class CliArgumentParser(argparse.ArgumentParser):
    """参数解析失败时抛 ConfigError,由 main 统一映射为退出码 1"""

    def error(self, message: str):
        raise ConfigError(message, field="argv")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="运行配置文件 (section.key = value)")
    common.add_argument("--out", help="输出目录")
    common.add_argument("--spacing", type=float, help="体素边长")
    common.add_argument("--angle-step", type=float, help="方向扫描角度步长 (度)")
    common.add_argument("--eta-steps", type=int, help="η 采样数")
    common.add_argument("--threads", type=int, help="并行进程数")
    common.add_argument("--seed", type=int, help="随机种子 (仅自检使用)")

    parser = CliArgumentParser(prog="ppr-workspace", description="3-(P̄P(2-(UP̄S))) 冗余并联机构工作空间分析")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analyze", parents=[common], help="参考分析: 体积、边界、空腔、TI")
    sub.add_parser("sweep", parents=[common], help="单参数扫描")
    sub.add_parser("surface", parents=[common], help="(a, d_s) 体积曲面")
    sub.add_parser("orientation", parents=[common], help="方向工作空间扫描")
    sub.add_parser("compare", parents=[common], help="命名构型对比")
    sub.add_parser("check", parents=[common], help="快速自检")
    mob = sub.add_parser("mobility", help="自由度计算")
    mob.add_argument("--counts", type=int, nargs=6, metavar=("D", "N", "G", "F", "NU", "XI"), help="d n g Σf ν ξ")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """配置文件 + 命令行覆盖"""
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    return cfg.with_overrides(
        spacing=args.spacing,
        angle_step=args.angle_step,
        eta_steps=args.eta_steps,
        threads=args.threads,
        seed=args.seed,
        output_dir=args.out,
    )


def run(args: argparse.Namespace) -> int:
    if args.command == "mobility":
        commands.cmd_mobility(args.counts)
        return EXIT_OK

    cfg = load_config(args)
    logger.info(f"🚀 {args.command}: 输出目录 {cfg.out_dir}, 进程数 {cfg.workers}")
    if args.command == "check":
        results = commands.cmd_check(cfg)
        if not all(r.passed for r in results):
            logger.error("💥 自检未通过")
            return EXIT_RUNTIME
        return EXIT_OK

    handlers = {
        "analyze": commands.cmd_analyze,
        "sweep": commands.cmd_sweep,
        "surface": commands.cmd_surface,
        "orientation": commands.cmd_orientation,
        "compare": commands.cmd_compare,
    }
    handlers[args.command](cfg)
    logger.info("🎉 完成!")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """主函数"""
    try:
        args = build_parser().parse_args(argv)
        settings.validate()
        return run(args)
    except ValueError as e:
        logger.error(f"❌ 配置验证失败: {e}")
        return EXIT_INVALID
    except Exception as e:
        logger.error(f"💥 运行出错: {e}", exc_info=True)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
