"""XYZ 点云导出"""
from exporters.base import BaseExporter
from utils.message_formatter import format_number
from workspace.grid import VoxelGrid, VoxelLabel

XYZ_SCHEMA = "ppr-workspace/xyz@1"


class XyzCloudExporter(BaseExporter):
    """每个非外部体素一行 "x y z label",label 1 为可达,2 为空腔"""

    schema = XYZ_SCHEMA
    suffix = ".xyz"

    def render(self, gridv: VoxelGrid) -> str:
        lines = [
            f"# schema: {self.schema}",
            "# units: length",
            f"# spacing: {format_number(gridv.spacing)}",
            f"# labels: {int(VoxelLabel.REACHABLE)}=reachable {int(VoxelLabel.CAVITY)}=cavity",
            "# columns: x y z label",
        ]
        xs, ys, zs = (gridv.axis_centers(axis) for axis in range(3))
        # C 顺序遍历,输出顺序固定
        for i, j, k in zip(*(gridv.labels != VoxelLabel.UNREACHABLE).nonzero()):
            label = int(gridv.labels[i, j, k])
            lines.append(f"{format_number(float(xs[i]))} {format_number(float(ys[j]))} {format_number(float(zs[k]))} {label}")
        return "\n".join(lines) + "\n"
