"""进度条生成工具"""


def render_bar(fraction: float, width: int = 20) -> str:
    """把 [0, 1] 内的比例画成文本进度条

    Returns:
        进度条字符串,格式: ███████████████░░░░░ 75.0%
    """
    fraction = min(max(float(fraction), 0.0), 1.0)
    filled_blocks = int(fraction * width)
    empty_blocks = width - filled_blocks
    return "█" * filled_blocks + "░" * empty_blocks + f" {fraction * 100:.1f}%"


def render_progress(done: int, total: int, width: int = 20) -> str:
    """已完成数 / 总数 的进度条,格式: ████░░░░ 50.0% (5/10)"""
    fraction = done / total if total else 0.0
    return f"{render_bar(fraction, width)} ({done}/{total})"
