"""任务并发协调器

把相互独立的计算任务 (体素层、方向扫描、参数扫描的每一行) 分发到执行器,
单个任务失败只记录错误,不影响其他任务。
"""
import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from typing import Any, Callable, Dict, Hashable, List, Sequence, Tuple

import pendulum

logger = logging.getLogger(__name__)

Job = Tuple[Hashable, Callable[..., Any], Sequence[Any]]


def _make_executor(workers: int):
    if workers > 1:
        return ProcessPoolExecutor(max_workers=workers)
    return ThreadPoolExecutor(max_workers=1)


async def collect_all(jobs: List[Job], workers: int = 1) -> Dict[str, Any]:
    """并发执行所有任务

    Args:
        jobs: (key, 函数, 参数) 列表,函数必须可被子进程导入
        workers: 工作进程数,1 表示在单个线程里顺序执行

    Returns:
        {"timestamp": 开始时间, "results": {key: 结果}, "errors": {key: 错误信息}}
    """
    data = {
        "timestamp": pendulum.now("UTC"),
        "results": {},
        "errors": {},
    }
    if not jobs:
        return data

    loop = asyncio.get_running_loop()
    with _make_executor(workers) as executor:
        results = await asyncio.gather(
            *[loop.run_in_executor(executor, fn, *args) for _, fn, args in jobs],
            return_exceptions=True,
        )

    for (key, _, _), result in zip(jobs, results):
        if isinstance(result, Exception):
            logger.error(f"❌ 任务 {key} 失败: {type(result).__name__}: {result}")
            data["errors"][key] = f"{type(result).__name__}: {result}"
        else:
            data["results"][key] = result
            logger.debug(f"✅ 任务 {key} 完成")

    return data


def run_jobs(jobs: List[Job], workers: int = 1) -> Dict[str, Any]:
    """collect_all 的同步入口"""
    return asyncio.run(collect_all(jobs, workers))
