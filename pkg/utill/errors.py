class PipelineError(Exception):
    """Base error of every stage. `exit_code` is what the CLI returns."""
    exit_code: int = 1

    def __init__(self, detail: str, exit_code: int | None = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self):
        return self.detail


class GraphFormatError(PipelineError):
    exit_code = 2

    def __init__(self, path, line: int | None, detail: str):
        where = f'{path}:{line}' if line is not None else f'{path}'
        super().__init__(f'{where}: {detail}')
        self.path = path
        self.line = line


class ConfigError(PipelineError):
    exit_code = 2


class MissingArtifactError(PipelineError):
    exit_code = 3

    def __init__(self, path, stage: str):
        super().__init__(f'missing artifact {path} (run the `{stage}` stage first)')
        self.path = path
        self.stage = stage


class CheckpointError(PipelineError):
    exit_code = 3


class ShapeError(PipelineError):
    def __init__(self, primitive: str, *shapes):
        shown = ', '.join(str(tuple(s)) for s in shapes)
        super().__init__(f'{primitive}: incompatible shapes {shown}')
        self.primitive = primitive
        self.shapes = shapes


class NotNormalizedError(PipelineError):
    pass


class ZeroNormError(PipelineError):
    pass


class NotAnEdgeError(PipelineError):
    pass


class InsufficientNodesError(PipelineError):
    pass


class SingleClassError(PipelineError):
    pass


class TrainingDivergedError(PipelineError):
    def __init__(self, epoch: int):
        super().__init__(f'loss became NaN/inf at epoch {epoch}')
        self.epoch = epoch


class IsolatedNodeError(PipelineError):
    pass
