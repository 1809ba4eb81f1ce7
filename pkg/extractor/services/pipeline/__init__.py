from extractor.services.pipeline.continual_runner import ContinualRunner, build_stream, run
from extractor.services.pipeline.report_merger import ReportMerger
from extractor.services.pipeline.run_state_controller import RunState, RunStateController
from extractor.services.pipeline.sweep_runner import SweepRunner, sweep

__all__ = ['ContinualRunner', 'build_stream', 'run', 'ReportMerger', 'RunState', 'RunStateController',
           'SweepRunner', 'sweep']
