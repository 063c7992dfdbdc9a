from django.urls import path

from .views import SolveView, SymbolView, VerifyView

urlpatterns = [
    path('solve/', SolveView.as_view(), name='solve'),
    path('verify/', VerifyView.as_view(), name='verify'),
    path('symbol/', SymbolView.as_view(), name='symbol'),
]
