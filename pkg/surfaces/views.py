import logging

from django.http import QueryDict
from rest_framework import status
from rest_framework.response import Response
from rest_framework.views import APIView

from .conf import override_tolerances
from .exceptions import EXIT_USAGE, BetaLabError
from .utils import UsageError, jsonable, profile_columns, resolve_run_config, solve_profiles, symbol_report, verify_report

logger = logging.getLogger(__name__)


def request_flags(data):
    """Plain dict of posted flags; form posts may repeat beta."""
    if isinstance(data, QueryDict):
        flags = data.dict()
        if len(data.getlist('beta')) > 1:
            flags['beta'] = data.getlist('beta')
        return flags
    return dict(data)


class LabView(APIView):
    """Runs a lab computation on a posted RunConfig"""
    defaults = {}

    def compute(self, config):
        raise NotImplementedError

    def post(self, request):
        try:
            config = resolve_run_config(self.defaults, request_flags(request.data))
            with override_tolerances(config.get('tolerances')):
                payload = self.compute(config)
            return Response(jsonable(payload))
        except UsageError as e:
            return Response(e.as_dict(), status=status.HTTP_400_BAD_REQUEST)
        except BetaLabError as e:
            logger.warning(f"{e.code} while serving {request.path}: {e}")
            code = status.HTTP_400_BAD_REQUEST if e.exit_code == EXIT_USAGE else status.HTTP_422_UNPROCESSABLE_ENTITY
            return Response(jsonable(e.as_dict()), status=code)


class SolveView(LabView):
    """Solve one or more rotational profiles"""
    defaults = {'beta': [1.0], 'c1': 1.0, 'c2': 1.0, 'eps': 0.1, 'r_max': 10.0, 'samples': 257,
                'f0': 0.0, 'g0': 0.0}

    def compute(self, config):
        return {'profiles': [profile_columns(profile, residual) for profile, residual in solve_profiles(config)]}


class VerifyView(LabView):
    """Full check report for one profile"""
    defaults = {'beta': [2.0], 'c1': 1.0, 'c2': 1.0, 'eps': 1e-3, 'r_max': 1e3, 'samples': 4097,
                'f0': 0.0, 'g0': 0.0}

    def compute(self, config):
        return verify_report(config)


class SymbolView(LabView):
    """Ellipticity sweep of the principal symbol"""
    defaults = {'beta': [1.0], 'directions': 100, 'points': 8}

    def compute(self, config):
        return symbol_report(config)
