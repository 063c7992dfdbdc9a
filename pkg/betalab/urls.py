from django.urls import path, include
from django.http import JsonResponse


def api_root(request):
    """API root endpoint"""
    return JsonResponse({
        'message': 'beta-symplectic critical surface lab',
        'version': '1.0',
        'endpoints': {
            'solve': '/api/solve/',
            'verify': '/api/verify/',
            'symbol': '/api/symbol/',
        }
    })


urlpatterns = [
    path('', api_root, name='api_root'),
    path('api/', include('surfaces.urls')),
]
